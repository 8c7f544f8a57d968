use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use braidcomb::closed::{closed_comb, project, section_s, Pi1Word};
use braidcomb::combing::{compare_combed, Comparison, CombedNormalForm};
use braidcomb::fingerprint::{Method, Verdict, DEFAULT_EXACT_THRESHOLD, DEFAULT_LAMBDA, DEFAULT_SEED};
use braidcomb::slp::{approx_log2, fibonacci, fibonacci_number};
use braidcomb::{beta_m, comb_compressed, parse_word_for, BraidWord, CheckerConfig, EqualityChecker, Error, Letter, SurfaceParams};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "braidcomb", version, about = "Comb pure surface braids and decide their word problem")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Genus of the surface.
    #[arg(long, global = true, default_value_t = 0)]
    g: u32,
    /// Number of boundary components (ignored with --closed).
    #[arg(long, global = true, default_value_t = 1)]
    p: u32,
    /// Number of strands.
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Use the closed surface of genus g.
    #[arg(long, global = true)]
    closed: bool,
    /// Target error exponent: unequal inputs are reported equal with probability below 2^-lambda.
    #[arg(long, global = true, default_value_t = DEFAULT_LAMBDA, value_parser = clap::value_parser!(u32).range(1..))]
    lambda: u32,
    /// Compare by expansion when evaluations are at most this long.
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_THRESHOLD)]
    exact_threshold: u64,
    /// Letter budget for exponential (classical and closed-surface) paths.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,
    /// Seed for the fingerprint primes; decimal or 0x-prefixed hex.
    #[arg(long, global = true, env = "BRAIDCOMB_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also print expanded factors that fit under the exact threshold.
    #[arg(long, global = true)]
    show_eval: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Comb a braid word into compressed factors.
    Comb {
        /// Braid word such as "A(1,2) A(2,3)^-1"; read from stdin if omitted.
        word: Option<String>,
    },
    /// Decide whether two words represent the same braid (exit 0 equal, 1 unequal).
    Eq {
        word1: Option<String>,
        word2: Option<String>,
    },
    /// Families with exponentially long combed forms.
    #[command(subcommand)]
    Demo(Demo),
    /// Closed-surface operations.
    #[command(subcommand)]
    Closed(Closed),
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// The n-th Fibonacci program.
    Fib {
        #[arg(value_name = "N")]
        index: usize,
    },
    /// beta_m in the 4-strand disc group.
    Beta { m: usize },
}

#[derive(Subcommand, Debug)]
enum Closed {
    /// Lift a surface-group word such as "a1 a2^-1" to a braid.
    Section { gamma: Option<String> },
    /// Project a braid to the surface group.
    Project { word: Option<String> },
    /// Split a braid into its surface-group part and combed kernel.
    Comb { word: Option<String> },
}

fn parse_seed(text: &str) -> Result<u64, String> {
    let parsed = match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => text.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {text:?}: {e}"))
}

impl RunConfig {
    fn params(&self) -> Result<SurfaceParams, Error> {
        let n = self.n.ok_or_else(|| Error::InvalidParams("--n is required".into()))?;
        if self.closed {
            SurfaceParams::closed(self.g, n)
        } else {
            SurfaceParams::bounded(self.g, self.p, n)
        }
    }

    fn checker(&self) -> EqualityChecker {
        EqualityChecker::new(CheckerConfig {
            lambda: self.lambda,
            exact_threshold: self.exact_threshold,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

/// Non-zero exit for usage and input errors.
const EXIT_ERROR: u8 = 2;

enum Outcome {
    Done,
    Unequal,
}

fn read_stdin_lines() -> Result<Vec<String>, Error> {
    io::stdin()
        .lock()
        .lines()
        .map(|l| l.map_err(|e| Error::InvalidParams(format!("reading stdin: {e}"))))
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .collect()
}

fn arg_or_stdin(arg: Option<String>) -> Result<String, Error> {
    match arg {
        Some(s) => Ok(s),
        None => Ok(read_stdin_lines()?.join(" ")),
    }
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
}

fn show_word(word: &[Letter]) -> String {
    if word.is_empty() {
        "1".into()
    } else {
        BraidWord::from(word.to_vec()).to_string()
    }
}

fn cmd_comb(config: &RunConfig, word: Option<String>) -> Result<Outcome, Error> {
    let params = config.params()?;
    let word = parse_word_for(&arg_or_stdin(word)?, &params)?;
    let nf = comb_compressed(&word, &params)?;
    let evaluations: Vec<Option<BraidWord>> = nf
        .factors
        .iter()
        .map(|f| f.slp.evaluate(config.exact_threshold).ok())
        .collect();
    if config.json {
        let mut value = serde_json::to_value(nf.to_json())?;
        if config.show_eval {
            value["evaluations"] = evaluations.iter().map(|e| e.as_ref().map(|w| w.to_string())).collect();
        }
        print_json(&value);
        return Ok(Outcome::Done);
    }
    println!("surface: {params}, input length {}", word.len());
    println!("factor 1: {}", show_word(&nf.factor1));
    for (f, eval) in nf.factors.iter().zip(&evaluations) {
        println!("factor {}: size {}, length {}", f.k, f.slp.size(), f.slp.eval_length());
        if config.show_eval {
            match eval {
                Some(w) => {
                    println!("  eval: {}", show_word(w));
                    println!("  reduced: {}", show_word(&w.reduced()));
                }
                None => println!("  eval: longer than the exact threshold"),
            }
        }
    }
    Ok(Outcome::Done)
}

fn verdict_json(k: usize, v: &Verdict) -> Value {
    let (method, primes) = match v.method {
        Method::Exact => ("exact", None),
        Method::Fingerprint { primes } => ("fingerprint", Some(primes)),
    };
    json!({ "k": k, "equal": v.equal, "method": method, "primes": primes })
}

fn comparison_json(c: &Comparison) -> Value {
    json!({
        "equal": c.equal(),
        "factor1_equal": c.factor1_equal,
        "factors": c.factors.iter().enumerate().map(|(idx, v)| verdict_json(idx + 2, v)).collect::<Vec<_>>(),
    })
}

fn compare(params: &SurfaceParams, checker: &EqualityChecker, w1: &str, w2: &str) -> Result<Comparison, Error> {
    let (a, b) = (parse_word_for(w1, params)?, parse_word_for(w2, params)?);
    let (na, nb) = std::thread::scope(|s| {
        let left = s.spawn(|| comb_compressed(&a, params));
        let right = comb_compressed(&b, params);
        (left.join().expect("combing does not panic"), right)
    });
    Ok(compare_combed(&na?, &nb?, checker))
}

fn cmd_eq(config: &RunConfig, word1: Option<String>, word2: Option<String>) -> Result<Outcome, Error> {
    let params = config.params()?;
    let checker = config.checker();
    let pairs: Vec<(String, String)> = match (word1, word2) {
        (Some(a), Some(b)) => vec![(a, b)],
        (None, None) => {
            let lines = read_stdin_lines()?;
            if lines.len() % 2 != 0 {
                return Err(Error::InvalidParams("stdin must hold an even number of words, one per line".into()));
            }
            lines.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
        }
        _ => return Err(Error::InvalidParams("give two words, or none to read pairs of lines from stdin".into())),
    };
    let mut all_equal = true;
    let mut results = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        let c = compare(&params, &checker, a, b)?;
        all_equal &= c.equal();
        results.push(c);
    }
    if config.json {
        let values: Vec<Value> = results.iter().map(comparison_json).collect();
        print_json(&if values.len() == 1 { values[0].clone() } else { Value::Array(values) });
    } else {
        for c in &results {
            let detail: Vec<String> = c
                .factors
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.equal)
                .map(|(idx, _)| format!("factor {}", idx + 2))
                .chain((!c.factor1_equal).then(|| "factor 1".to_string()))
                .collect();
            if c.equal() {
                println!("equal");
            } else {
                println!("unequal ({} differ)", detail.join(", "));
            }
        }
    }
    Ok(if all_equal { Outcome::Done } else { Outcome::Unequal })
}

fn cmd_demo(config: &RunConfig, demo: Demo) -> Result<Outcome, Error> {
    match demo {
        Demo::Fib { index: n } => {
            if n == 0 {
                return Err(Error::InvalidParams("n must be at least 1".into()));
            }
            let (a, b) = (Letter::new(1, 3), Letter::new(2, 3));
            let slp = fibonacci(n, a, b);
            let length = fibonacci_number(n);
            let word = slp.evaluate(config.exact_threshold.min(200)).ok().map(|w| {
                w.iter().map(|&l| if l == a { 'a' } else { 'b' }).collect::<String>()
            });
            if config.json {
                print_json(&json!({
                    "n": n, "size": slp.size(), "length": length.to_string(),
                    "log2_length": approx_log2(&length), "word": word,
                }));
            } else {
                println!("fib {n}: size {}, length {length}", slp.size());
                if let Some(w) = word {
                    println!("word: {w}");
                }
            }
        }
        Demo::Beta { m } => {
            if m == 0 {
                return Err(Error::InvalidParams("m must be at least 1".into()));
            }
            let disc = SurfaceParams::disc(4)?;
            let word = beta_m(m);
            let nf = comb_compressed(&word, &disc)?;
            let reduced = nf.reduced_factor(4, config.budget)?.len();
            let bound = 3u128.checked_pow(m as u32 - 1).map(|p| 2 * p);
            let holds = bound.map_or(false, |b| reduced as u128 >= b);
            let lengths: Vec<String> = nf.eval_lengths().iter().map(|l| l.to_string()).collect();
            if config.json {
                print_json(&json!({
                    "m": m, "input_length": word.len(), "sizes": nf.sizes(), "eval_lengths": lengths,
                    "reduced_length": reduced, "lower_bound": bound.map(|b| b.to_string()), "bound_holds": holds,
                }));
            } else {
                println!("beta {m}: input length {}", word.len());
                println!("sizes: {:?}", nf.sizes());
                println!("eval lengths: {}", lengths.join(", "));
                match bound {
                    Some(b) => println!(
                        "reduced factor 4 length {reduced} {} 2*3^{} = {b}",
                        if holds { ">=" } else { "<" },
                        m - 1
                    ),
                    None => println!("reduced factor 4 length {reduced}"),
                }
            }
        }
    }
    Ok(Outcome::Done)
}

fn cmd_closed(config: &RunConfig, sub: Closed) -> Result<Outcome, Error> {
    let params = config.params()?;
    if !params.closed {
        return Err(Error::InvalidParams("closed commands need --closed".into()));
    }
    match sub {
        Closed::Section { gamma } => {
            let gamma: Pi1Word = arg_or_stdin(gamma)?.parse()?;
            let lifted = section_s(&gamma, &params)?;
            if config.json {
                print_json(&json!({ "gamma": gamma.to_string(), "word": lifted.to_string() }));
            } else {
                println!("{lifted}");
            }
        }
        Closed::Project { word } => {
            let word = parse_word_for(&arg_or_stdin(word)?, &params)?;
            let gamma = project(&word, &params)?;
            if config.json {
                print_json(&json!({ "gamma": gamma.to_string() }));
            } else {
                println!("{gamma}");
            }
        }
        Closed::Comb { word } => {
            let word = parse_word_for(&arg_or_stdin(word)?, &params)?;
            let d = closed_comb(&word, &params, config.budget)?;
            if config.json {
                print_json(&serde_json::to_value(d.to_json())?);
            } else {
                println!("gamma: {}", if d.gamma.is_empty() { "1".into() } else { d.gamma.to_string() });
                match &d.kernel {
                    Some(k) => print_kernel(k),
                    None => println!("kernel: trivial (single strand)"),
                }
            }
        }
    }
    Ok(Outcome::Done)
}

fn print_kernel(k: &CombedNormalForm) {
    println!("kernel over {}:", k.params);
    println!("  factor 1: {}", show_word(&k.factor1));
    for f in &k.factors {
        println!("  factor {}: size {}, length {}", f.k, f.slp.size(), f.slp.eval_length());
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Comb { word } => cmd_comb(&cli.config, word),
        Command::Eq { word1, word2 } => cmd_eq(&cli.config, word1, word2),
        Command::Demo(demo) => cmd_demo(&cli.config, demo),
        Command::Closed(sub) => cmd_closed(&cli.config, sub),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Unequal) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    };
    let _ = io::stdout().flush();
    code
}
