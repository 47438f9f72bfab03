//! Data ingestion and emission: FASTA, GenBank ORGANISM blocks, distance
//! CSVs.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::similarity::DistanceMatrix;

/// One FASTA record after normalization: the sequence is upper-case over
/// `{A, C, G, T, N}`, with every other character replaced by `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    /// Full header line, '>'-stripped and trimmed.
    pub description: String,
    pub sequence: String,
}

/// Parses a FASTA stream. CR, LF, and CRLF line endings are all accepted;
/// sequence lines are concatenated with whitespace removed, upper-cased, and
/// non-ACGT characters substituted by 'N'.
pub fn parse_fasta<R: Read>(mut reader: R) -> Result<Vec<FastaRecord>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_fasta_str(&text)
}

pub fn parse_fasta_str(text: &str) -> Result<Vec<FastaRecord>> {
    let mut records: Vec<FastaRecord> = Vec::new();
    let mut open = false;
    for line in split_lines(text) {
        if let Some(header) = line.strip_prefix('>') {
            records.push(FastaRecord {
                description: header.trim().to_string(),
                sequence: String::new(),
            });
            open = true;
            continue;
        }
        if !open {
            continue; // junk before the first header is ignored
        }
        let record = records.last_mut().expect("open record");
        for c in line.chars().filter(|c| !c.is_whitespace()) {
            record.sequence.push(normalize_base(c));
        }
    }
    if records.is_empty() {
        return Err(Error::FastaParse("no '>' header found".into()));
    }
    for r in &records {
        if r.sequence.is_empty() {
            return Err(Error::FastaParse(format!(
                "empty sequence under header {:?}",
                r.description
            )));
        }
    }
    Ok(records)
}

fn normalize_base(c: char) -> char {
    match c.to_ascii_uppercase() {
        b @ ('A' | 'C' | 'G' | 'T') => b,
        _ => 'N',
    }
}

/// Renders records back to FASTA text; parsing is idempotent on this output.
pub fn write_fasta(records: &[FastaRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push('>');
        out.push_str(&r.description);
        out.push('\n');
        out.push_str(&r.sequence);
        out.push('\n');
    }
    out
}

fn split_lines(text: &str) -> impl Iterator<Item = &str> {
    text.split(['\n', '\r']).filter(|l| !l.is_empty())
}

/// A taxonomic lineage, ordered general to specific.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxaLineage {
    names: Vec<String>,
}

impl TaxaLineage {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::GenBankParse("empty lineage".into()));
        }
        for name in &names {
            if name.is_empty() || name.contains(';') || name.trim() != name {
                return Err(Error::GenBankParse(format!("bad taxon name {name:?}")));
            }
        }
        Ok(TaxaLineage { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The lineage with the first `offset` ranks dropped (corpus-specific
    /// prefixes); dropping everything is an error.
    pub fn skip_prefix(&self, offset: usize) -> Result<TaxaLineage> {
        TaxaLineage::new(self.names[offset.min(self.names.len())..].to_vec())
    }
}

/// Extracts the semicolon-separated lineages of a GenBank flat file: the
/// lines between each `ORGANISM` line and the following `REFERENCE` line,
/// joined, with the trailing period stripped.
pub fn parse_genbank_lineages<R: Read>(mut reader: R) -> Result<Vec<TaxaLineage>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_genbank_lineages_str(&text)
}

pub fn parse_genbank_lineages_str(text: &str) -> Result<Vec<TaxaLineage>> {
    let lines: Vec<&str> = text.split(['\n', '\r']).collect();
    let mut lineages = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if !line.trim_start().starts_with("ORGANISM") {
            continue;
        }
        let mut joined = String::new();
        let mut closed = false;
        for continuation in &lines[i + 1..] {
            if continuation.trim_start().starts_with("REFERENCE") {
                closed = true;
                break;
            }
            if !joined.is_empty() {
                joined.push(' ');
            }
            joined.push_str(continuation.trim());
        }
        if !closed {
            return Err(Error::GenBankParse(
                "ORGANISM block without a following REFERENCE line".into(),
            ));
        }
        let joined = joined.trim().trim_end_matches('.');
        let names: Vec<String> = joined
            .split(';')
            .map(|name| name.split_whitespace().collect::<Vec<_>>().join(" "))
            .collect();
        if names.iter().any(String::is_empty) {
            return Err(Error::GenBankParse(format!(
                "empty taxon in lineage {joined:?}"
            )));
        }
        lineages.push(TaxaLineage::new(names)?);
    }
    Ok(lineages)
}

/// Tree-leaf label from a FASTA description: genus + species as the first
/// two tokens after the final '|', falling back to the full description.
pub fn species_label(description: &str) -> String {
    if let Some(pos) = description.rfind('|') {
        let tokens: Vec<&str> = description[pos + 1..].split_whitespace().collect();
        if tokens.len() >= 2 {
            return format!("{} {}", tokens[0], tokens[1]);
        }
    }
    description.trim().to_string()
}

/// Writes a distance matrix as CSV: a header row of labels, then `N` rows of
/// `N` entries. Values print in shortest round-trip form, so re-ingestion is
/// exact.
pub fn write_distance_csv<W: Write>(
    writer: W,
    matrix: &DistanceMatrix,
    labels: &[String],
) -> Result<()> {
    if labels.len() != matrix.size() {
        return Err(Error::SizeMismatch(format!(
            "{} labels for a {}x{} matrix",
            labels.len(),
            matrix.size(),
            matrix.size()
        )));
    }
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(labels)
        .map_err(|e| Error::CsvParse(e.to_string()))?;
    for i in 0..matrix.size() {
        let row: Vec<String> = (0..matrix.size())
            .map(|j| format!("{}", matrix.get(i, j)))
            .collect();
        csv.write_record(&row)
            .map_err(|e| Error::CsvParse(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

/// Reads a distance CSV produced by [`write_distance_csv`], returning the
/// labels and the validated matrix.
pub fn read_distance_csv<R: Read>(reader: R) -> Result<(Vec<String>, DistanceMatrix)> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(reader);
    let mut rows = csv.records();
    let labels: Vec<String> = match rows.next() {
        Some(record) => record
            .map_err(|e| Error::CsvParse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect(),
        None => return Err(Error::CsvParse("empty distance CSV".into())),
    };
    let n = labels.len();
    let mut values = Vec::with_capacity(n);
    for record in rows {
        let record = record.map_err(|e| Error::CsvParse(e.to_string()))?;
        let row: Vec<f64> = record
            .iter()
            .map(|field| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::CsvParse(format!("bad entry {field:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::CsvParse(format!(
                "row has {} entries, expected {n}",
                row.len()
            )));
        }
        values.push(row);
    }
    if values.len() != n {
        return Err(Error::CsvParse(format!(
            "{} data rows for {n} labels",
            values.len()
        )));
    }
    Ok((labels, DistanceMatrix::from_values(&values)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fasta_case_normalization_and_concatenation() {
        let records = parse_fasta_str(">x\nACGT\nacgt\n").unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].description, "x");
        assert_eq!(records[0].sequence, "ACGTACGT");
    }

    #[test]
    fn fasta_substitutes_ambiguous_bases() {
        let records = parse_fasta_str(">x\nACRT\n").unwrap();
        assert_eq!(records[0].sequence, "ACNT");
    }

    #[test]
    fn fasta_multiple_records_with_blank_lines() {
        let text = ">first record | detail\n\nAC GT\n\n>second\r\nTT\r\nNN\n";
        let records = parse_fasta_str(text).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].description, "first record | detail");
        assert_eq!(records[0].sequence, "ACGT");
        assert_eq!(records[1].sequence, "TTNN");
    }

    #[test]
    fn fasta_cr_only_line_endings() {
        let records = parse_fasta_str(">x\rACGT\rTT\r").unwrap();
        assert_eq!(records[0].sequence, "ACGTTT");
    }

    #[test]
    fn fasta_errors() {
        assert!(matches!(
            parse_fasta_str("ACGT\n"),
            Err(Error::FastaParse(_))
        ));
        assert!(matches!(
            parse_fasta_str(">x\n>y\nACGT\n"),
            Err(Error::FastaParse(_))
        ));
    }

    #[test]
    fn fasta_parse_is_idempotent_on_rendered_output() {
        let text = ">a | Homo sapiens mitochondrion, complete genome\nacgtnRYacgt\n>b\nTTTT\n";
        let once = parse_fasta_str(text).unwrap();
        let twice = parse_fasta_str(&write_fasta(&once)).unwrap();
        assert_eq!(once, twice);
    }

    const GENBANK_FIXTURE: &str = "\
LOCUS       NC_000001 16571 bp DNA circular PRI
DEFINITION  Homo sapiens mitochondrion, complete genome.
  ORGANISM  Homo sapiens
            Eukaryota; Metazoa; Primates.
REFERENCE   1  (bases 1 to 16571)
LOCUS       NC_000002
  ORGANISM  Pan troglodytes
            Eukaryota; Metazoa; Chordata; Craniata; Vertebrata; Euteleostomi;
            Mammalia; Eutheria; Euarchontoglires; Primates; Haplorrhini;
            Catarrhini; Hominidae; Pan.
REFERENCE   1  (bases 1 to 16554)
";

    #[test]
    fn genbank_lineages_parse_in_file_order() {
        let lineages = parse_genbank_lineages_str(GENBANK_FIXTURE).unwrap();
        assert_eq!(lineages.len(), 2);
        assert_eq!(lineages[0].names(), ["Eukaryota", "Metazoa", "Primates"]);
        assert_eq!(lineages[1].names().len(), 14);
        assert_eq!(lineages[1].names()[0], "Eukaryota");
        assert_eq!(lineages[1].names()[13], "Pan");
    }

    #[test]
    fn genbank_offset_drops_leading_ranks() {
        let lineages = parse_genbank_lineages_str(GENBANK_FIXTURE).unwrap();
        let skipped = lineages[0].skip_prefix(1).unwrap();
        assert_eq!(skipped.names(), ["Metazoa", "Primates"]);
        assert!(lineages[0].skip_prefix(3).is_err());
    }

    #[test]
    fn genbank_errors() {
        let missing_ref = "  ORGANISM  Homo sapiens\n            Eukaryota; Metazoa.\n";
        assert!(matches!(
            parse_genbank_lineages_str(missing_ref),
            Err(Error::GenBankParse(_))
        ));
        let empty_lineage = "  ORGANISM  Homo sapiens\nREFERENCE   1\n";
        assert!(matches!(
            parse_genbank_lineages_str(empty_lineage),
            Err(Error::GenBankParse(_))
        ));
    }

    #[test]
    fn species_labels() {
        assert_eq!(
            species_label("gi|123|ref|NC_1| Homo sapiens mitochondrion, complete genome"),
            "Homo sapiens"
        );
        assert_eq!(species_label("plain description"), "plain description");
        assert_eq!(species_label("gi|123| Single"), "gi|123| Single");
    }

    #[test]
    fn distance_csv_round_trips_exactly() {
        let rows = vec![
            vec![0.0, 0.125, 2.0 / 3.0],
            vec![0.125, 0.0, 1e-300],
            vec![2.0 / 3.0, 1e-300, 0.0],
        ];
        let matrix = DistanceMatrix::from_values(&rows).unwrap();
        let labels = vec![
            "plain".to_string(),
            "with, comma".to_string(),
            "with \"quotes\"".to_string(),
        ];
        let mut buffer = Vec::new();
        write_distance_csv(&mut buffer, &matrix, &labels).unwrap();
        let (read_labels, read_matrix) = read_distance_csv(buffer.as_slice()).unwrap();
        assert_eq!(read_labels, labels);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(read_matrix.get(i, j), matrix.get(i, j));
            }
        }
    }
}
