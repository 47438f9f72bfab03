//! `dbent`: de Bruijn entropy string similarity from the command line.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use debruijn_entropy::io::{
    parse_fasta_str, parse_genbank_lineages_str, read_distance_csv, species_label,
    write_distance_csv, FastaRecord,
};
use debruijn_entropy::oracle;
use debruijn_entropy::quiver::boxminus;
use debruijn_entropy::similarity::newick_export_annotated;
use debruijn_entropy::spin::{
    boltzmann_grid, partition_function, thermodynamic_limit, CouplingConvention, SpinParams,
};
use debruijn_entropy::{
    annotate_clades, binary_w1_closed_form, componentwise_entropy, distance_matrix, levenshtein,
    linkage, relative_entropy, suggest_k, word_entropy, Alphabet, CyclicWord, KSelection,
    LinkageMethod, Quiver, Tolerances,
};

#[derive(Parser)]
#[command(
    name = "dbent",
    version,
    about = "De Bruijn entropy and relative entropy of words, with an alignment-free similarity pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order-k de Bruijn entropy of a word, or of every record in a FASTA file
    Entropy {
        /// A word, or a path to a FASTA file
        input: String,
        /// Quiver order: an integer, or "auto" for floor(log_n ell)
        #[arg(long, default_value = "auto")]
        k: String,
        /// Alphabet symbols in order (defaults: sorted symbols of the word, or ACGTN for files)
        #[arg(long)]
        alphabet: Option<String>,
        /// Logarithm base for printed values: n (alphabet size), e (nats), or 2
        #[arg(long, default_value = "e")]
        base: String,
    },
    /// Relative de Bruijn entropy between two words
    Relent {
        word1: String,
        word2: String,
        #[arg(long, default_value = "auto")]
        k: String,
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long, default_value = "e")]
        base: String,
    },
    /// Pairwise relative-entropy distance matrix of a FASTA corpus, as CSV
    Matrix {
        fasta: PathBuf,
        /// Quiver order: an integer, "auto:informative", or "auto:linear-time"
        #[arg(long, default_value = "auto:informative")]
        k: String,
        /// Divide each entry by the concatenated-quiver entropy
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value = "ACGTN")]
        alphabet: String,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hierarchical clustering tree (Newick) from a distance CSV or FASTA file
    Tree {
        /// A distance CSV produced by `matrix`, or a FASTA file
        input: PathBuf,
        #[arg(long, default_value = "average")]
        method: String,
        /// GenBank flat file whose ORGANISM lineages annotate the clades
        #[arg(long)]
        taxa: Option<PathBuf>,
        /// Leading lineage ranks to drop before annotating
        #[arg(long, default_value_t = 0)]
        taxa_offset: usize,
        /// Quiver order when the input is FASTA
        #[arg(long, default_value = "auto:informative")]
        k: String,
        /// Normalize distances when the input is FASTA
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value = "ACGTN")]
        alphabet: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The binary order-1 class-count table W_1(x00, x*) for a given length, as CSV
    Table {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative-entropy grid H_1(w' || w) over (x00', x*') against a fixed (x00, x*), as CSV
    Relgrid {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        x00: u64,
        #[arg(long)]
        xstar: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite circular Ising chain: log Z, Z^(1/ell), and the thermodynamic limit
    Spin {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        beta: f64,
        #[arg(long = "J")]
        coupling: f64,
        #[arg(long = "K")]
        field: f64,
        /// Coupling convention: eq12 (prefactor 1) or text (prefactor 2)
        #[arg(long, default_value = "eq12")]
        convention: String,
        /// Also emit the (x00, x*, H1, energy, weight) grid as CSV
        #[arg(long)]
        grid_out: Option<PathBuf>,
    },
    /// Unit-cost edit distance between two words
    Levenshtein { word1: String, word2: String },
    /// Brute-force oracles (debugging)
    #[command(hide = true)]
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Enumerate the cyclic words sharing a word's order-k quiver
    Class {
        word: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Count Euler circuits of a word's quiver by backtracking
    Circuits {
        word: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Necklace count by the Cauchy-Frobenius lemma
    Burnside {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        ell: u64,
    },
}

fn main() {
    if let Err(e) = run() {
        // a reader hanging up mid-stream is not a failure
        if let Some(io_err) = find_io_error(&e) {
            if io_err.kind() == io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn find_io_error(e: &anyhow::Error) -> Option<&io::Error> {
    e.chain().find_map(|cause| {
        cause.downcast_ref::<io::Error>().or_else(|| {
            cause
                .downcast_ref::<debruijn_entropy::Error>()
                .and_then(|inner| match inner {
                    debruijn_entropy::Error::Io(io_err) => Some(io_err),
                    _ => None,
                })
        })
    })
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Entropy {
            input,
            k,
            alphabet,
            base,
        } => cmd_entropy(&input, &k, alphabet.as_deref(), &base),
        Command::Relent {
            word1,
            word2,
            k,
            alphabet,
            base,
        } => cmd_relent(&word1, &word2, &k, alphabet.as_deref(), &base),
        Command::Matrix {
            fasta,
            k,
            normalize,
            alphabet,
            out,
        } => cmd_matrix(&fasta, &k, normalize, &alphabet, out.as_deref()),
        Command::Tree {
            input,
            method,
            taxa,
            taxa_offset,
            k,
            normalize,
            alphabet,
            out,
        } => cmd_tree(
            &input,
            &method,
            taxa.as_deref(),
            taxa_offset,
            &k,
            normalize,
            &alphabet,
            out.as_deref(),
        ),
        Command::Table { ell, out } => cmd_table(ell, out.as_deref()),
        Command::Relgrid {
            ell,
            x00,
            xstar,
            out,
        } => cmd_relgrid(ell, x00, xstar, out.as_deref()),
        Command::Spin {
            ell,
            beta,
            coupling,
            field,
            convention,
            grid_out,
        } => cmd_spin(ell, beta, coupling, field, &convention, grid_out.as_deref()),
        Command::Levenshtein { word1, word2 } => {
            println!("{}", levenshtein(&word1, &word2));
            Ok(())
        }
        Command::Oracle { command } => cmd_oracle(command),
    }
}

/// "auto" / "auto:informative" / "auto:linear-time" / explicit integer.
enum OrderChoice {
    Fixed(usize),
    Auto(KSelection),
}

fn parse_order(text: &str) -> Result<OrderChoice> {
    match text {
        "auto" | "auto:informative" => Ok(OrderChoice::Auto(KSelection::Informative)),
        "auto:linear-time" => Ok(OrderChoice::Auto(KSelection::linear_time())),
        other => {
            let k: usize = other
                .parse()
                .map_err(|_| anyhow!("--k must be a positive integer or auto, got {other:?}"))?;
            if k == 0 {
                bail!("--k must be at least 1");
            }
            Ok(OrderChoice::Fixed(k))
        }
    }
}

fn resolve_order(choice: &OrderChoice, min_len: usize, n: usize) -> usize {
    match choice {
        OrderChoice::Fixed(k) => *k,
        OrderChoice::Auto(mode) => suggest_k(min_len as u64, n, *mode),
    }
}

enum BaseChoice {
    Nats,
    Bits,
    AlphabetSize,
}

fn parse_base(text: &str) -> Result<BaseChoice> {
    match text {
        "e" => Ok(BaseChoice::Nats),
        "2" => Ok(BaseChoice::Bits),
        "n" => Ok(BaseChoice::AlphabetSize),
        other => bail!("--base must be n, e, or 2, got {other:?}"),
    }
}

fn format_value(nats: f64, base: &BaseChoice, n: usize) -> String {
    match base {
        BaseChoice::Nats => format!("{nats} nats"),
        BaseChoice::Bits => format!("{} bits", nats / std::f64::consts::LN_2),
        BaseChoice::AlphabetSize => {
            format!("{} (base {n})", nats / (n as f64).ln())
        }
    }
}

fn alphabet_for_word(words: &[&str], requested: Option<&str>) -> Result<Arc<Alphabet>> {
    let symbols: String = match requested {
        Some(s) => s.to_string(),
        None => {
            let mut chars: Vec<char> = words.iter().flat_map(|w| w.chars()).collect();
            chars.sort_unstable();
            chars.dedup();
            chars.into_iter().collect()
        }
    };
    Ok(Arc::new(Alphabet::from_str(&symbols)?))
}

fn cmd_entropy(input: &str, k: &str, alphabet: Option<&str>, base: &str) -> Result<()> {
    let choice = parse_order(k)?;
    let base = parse_base(base)?;
    if Path::new(input).is_file() {
        let records = read_fasta_file(Path::new(input))?;
        let alphabet = Arc::new(Alphabet::from_str(alphabet.unwrap_or("ACGTN"))?);
        let min_len = records.iter().map(|r| r.sequence.len()).min().unwrap_or(0);
        let order = resolve_order(&choice, min_len, alphabet.size());
        for record in &records {
            let word = CyclicWord::from_text(&record.sequence, &alphabet)?;
            let value = word_entropy(&word, order)?;
            let mut line = format!(
                "{}: H_{order} = {}",
                species_label(&record.description),
                format_value(value.nats, &base, alphabet.size())
            );
            if let Some(w) = value.count() {
                line.push_str(&format!(", W_{order} = {w}"));
            }
            println!("{line}");
        }
    } else {
        let alphabet = alphabet_for_word(&[input], alphabet)?;
        let word = CyclicWord::from_text(input, &alphabet)?;
        let order = resolve_order(&choice, word.len(), alphabet.size());
        let value = word_entropy(&word, order)?;
        println!(
            "H_{order}({input}) = {}",
            format_value(value.nats, &base, alphabet.size())
        );
        if let Some(w) = value.count() {
            println!("W_{order} = {w}");
        }
    }
    Ok(())
}

fn cmd_relent(w1: &str, w2: &str, k: &str, alphabet: Option<&str>, base: &str) -> Result<()> {
    let choice = parse_order(k)?;
    let base = parse_base(base)?;
    let alphabet = alphabet_for_word(&[w1, w2], alphabet)?;
    let a = CyclicWord::from_text(w1, &alphabet)?;
    let b = CyclicWord::from_text(w2, &alphabet)?;
    let order = resolve_order(&choice, a.len().min(b.len()), alphabet.size());
    let value = relative_entropy(&a, &b, order)?;
    println!(
        "H_{order}({w1} || {w2}) = {}",
        format_value(value.nats, &base, alphabet.size())
    );
    if let Some(w) = value.count() {
        println!("W = {w}");
    }
    Ok(())
}

fn read_fasta_file(path: &Path) -> Result<Vec<FastaRecord>> {
    let mut text = String::new();
    File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .read_to_string(&mut text)?;
    Ok(parse_fasta_str(&text)?)
}

fn corpus_words(
    records: &[FastaRecord],
    alphabet: &Arc<Alphabet>,
) -> Result<(Vec<CyclicWord>, Vec<String>)> {
    let mut words = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());
    for r in records {
        words.push(CyclicWord::from_text(&r.sequence, alphabet)?);
        labels.push(species_label(&r.description));
    }
    Ok((words, labels))
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        ),
        None => Box::new(io::stdout()),
    })
}

fn cmd_matrix(
    fasta: &Path,
    k: &str,
    normalize: bool,
    alphabet: &str,
    out: Option<&Path>,
) -> Result<()> {
    let choice = parse_order(k)?;
    let records = read_fasta_file(fasta)?;
    let alphabet = Arc::new(Alphabet::from_str(alphabet)?);
    let (words, labels) = corpus_words(&records, &alphabet)?;
    let min_len = words.iter().map(CyclicWord::len).min().unwrap_or(0);
    let order = resolve_order(&choice, min_len, alphabet.size());
    let matrix = distance_matrix(&words, order, normalize)?;
    write_distance_csv(open_output(out)?, &matrix, &labels)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_tree(
    input: &Path,
    method: &str,
    taxa: Option<&Path>,
    taxa_offset: usize,
    k: &str,
    normalize: bool,
    alphabet: &str,
    out: Option<&Path>,
) -> Result<()> {
    let method: LinkageMethod = method.parse()?;
    let mut text = String::new();
    File::open(input)
        .with_context(|| format!("cannot open {}", input.display()))?
        .read_to_string(&mut text)?;

    let (labels, matrix) = if text.trim_start().starts_with('>') {
        let records = parse_fasta_str(&text)?;
        let alphabet = Arc::new(Alphabet::from_str(alphabet)?);
        let (words, labels) = corpus_words(&records, &alphabet)?;
        let min_len = words.iter().map(CyclicWord::len).min().unwrap_or(0);
        let order = resolve_order(&parse_order(k)?, min_len, alphabet.size());
        (labels, distance_matrix(&words, order, normalize)?)
    } else {
        read_distance_csv(text.as_bytes())?
    };

    let tree = linkage(&matrix, method)?;
    let clade_labels = match taxa {
        Some(path) => {
            let mut taxa_text = String::new();
            File::open(path)
                .with_context(|| format!("cannot open {}", path.display()))?
                .read_to_string(&mut taxa_text)?;
            let lineages = parse_genbank_lineages_str(&taxa_text)?;
            if lineages.len() != tree.leaves() {
                bail!(
                    "{} lineages in {} for {} leaves",
                    lineages.len(),
                    path.display(),
                    tree.leaves()
                );
            }
            let lists: Vec<Vec<String>> = lineages
                .iter()
                .map(|l| Ok(l.skip_prefix(taxa_offset)?.names().to_vec()))
                .collect::<Result<_>>()?;
            Some(annotate_clades(&tree, &lists)?)
        }
        None => None,
    };
    let newick = newick_export_annotated(&tree, &labels, clade_labels.as_deref())?;
    let mut output = open_output(out)?;
    writeln!(output, "{newick}")?;
    Ok(())
}

/// One table cell: the exact count when it snaps, the real value otherwise.
fn format_count_cell(log_w: f64) -> String {
    match debruijn_entropy::numeric::snap_to_count(log_w, &Tolerances::DEFAULT) {
        Some(w) => w.to_string(),
        None => format!("{:e}", log_w.exp()),
    }
}

fn cmd_table(ell: u64, out: Option<&Path>) -> Result<()> {
    if ell < 2 {
        bail!("--ell must be at least 2");
    }
    let mut output = open_output(out)?;
    let header: Vec<String> = std::iter::once("xstar".to_string())
        .chain((0..=ell).map(|x| x.to_string()))
        .collect();
    writeln!(output, "{}", header.join(","))?;
    for xstar in 0..=ell / 2 {
        let mut row = vec![xstar.to_string()];
        for x00 in 0..=ell {
            let cell = match binary_w1_closed_form(x00, xstar, ell) {
                Ok(log_w) => format_count_cell(log_w),
                Err(_) => String::new(),
            };
            row.push(cell);
        }
        writeln!(output, "{}", row.join(","))?;
    }
    Ok(())
}

fn cmd_relgrid(ell: u64, x00: u64, xstar: u64, out: Option<&Path>) -> Result<()> {
    // validates the fixed cell
    binary_w1_closed_form(x00, xstar, ell)?;
    let base = binary_quiver(x00, xstar, ell)?;

    let mut output = open_output(out)?;
    writeln!(output, "x00p,xstarp,h1_nats,boxminus_entry_sum,exceeds_ell")?;
    for xstarp in 1..=ell / 2 {
        for x00p in 0..=ell.saturating_sub(2 * xstarp) {
            let other = binary_quiver(x00p, xstarp, ell)?;
            let diff = boxminus(&base, &other)?;
            let h = componentwise_entropy(&diff)?.nats;
            let entry_sum = diff.edge_total();
            writeln!(
                output,
                "{x00p},{xstarp},{h},{entry_sum},{}",
                u8::from(entry_sum > ell)
            )?;
        }
    }
    Ok(())
}

fn binary_quiver(x00: u64, xstar: u64, ell: u64) -> Result<Quiver> {
    let x11 = ell
        .checked_sub(x00 + 2 * xstar)
        .ok_or_else(|| anyhow!("invalid cell ({x00}, {xstar}) for ell {ell}"))?;
    Ok(Quiver::from_dense_matrix(
        1,
        2,
        &[vec![x00, xstar], vec![xstar, x11]],
    )?)
}

fn cmd_spin(
    ell: u64,
    beta: f64,
    coupling: f64,
    field: f64,
    convention: &str,
    grid_out: Option<&Path>,
) -> Result<()> {
    let convention = match convention {
        "eq12" => CouplingConvention::Eq12Consistent,
        "text" => CouplingConvention::TextPotential,
        other => bail!("--convention must be eq12 or text, got {other:?}"),
    };
    let params = SpinParams::new(coupling, field, beta, ell, convention)?;
    let log_z = partition_function(&params);
    println!("log_Z = {log_z}");
    println!("Z_per_site = {}", (log_z / ell as f64).exp());
    println!("thermodynamic_limit = {}", thermodynamic_limit(&params));

    if let Some(path) = grid_out {
        let mut output = open_output(Some(path))?;
        writeln!(output, "x00,xstar,h1_nats,energy,boltzmann_weight")?;
        for cell in boltzmann_grid(&params)? {
            writeln!(
                output,
                "{},{},{},{},{}",
                cell.x00, cell.xstar, cell.h1_nats, cell.energy, cell.boltzmann_weight
            )?;
        }
    }
    Ok(())
}

fn cmd_oracle(command: OracleCommand) -> Result<()> {
    match command {
        OracleCommand::Class { word, k, alphabet } => {
            let alphabet = alphabet_for_word(&[word.as_str()], alphabet.as_deref())?;
            let w = CyclicWord::from_text(&word, &alphabet)?;
            let class = oracle::enumerate_class(&w, k)?;
            println!("count = {}", class.count());
            for member in &class.members {
                println!("{member}");
            }
        }
        OracleCommand::Circuits { word, k, alphabet } => {
            let alphabet = alphabet_for_word(&[word.as_str()], alphabet.as_deref())?;
            let w = CyclicWord::from_text(&word, &alphabet)?;
            let q = Quiver::from_word(&w, k)?;
            println!("{}", oracle::count_euler_circuits(&q)?);
        }
        OracleCommand::Burnside { n, ell } => {
            println!("{}", oracle::burnside_necklaces(n, ell)?);
        }
    }
    Ok(())
}
