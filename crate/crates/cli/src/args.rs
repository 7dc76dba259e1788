//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ybe_core::permgroup::DEFAULT_CAP;

use crate::run::{Command, InputSource, OutputFormat, RunConfig, DEFAULT_RADIUS, DEFAULT_SAMPLES};

#[derive(Debug, Parser)]
#[command(name = "ybe", version, about = "Build and check finite set-theoretic Yang-Baxter solutions")]
pub struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Drop timing fields from the report.
    #[arg(long, global = true)]
    pub no_timings: bool,
    /// Enumeration cap for permutation groups.
    #[arg(long, global = true, env = "YBE_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Parameter file for the family.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Solution file (`n=...` followed by the σ rows).
    #[arg(long, visible_alias = "in")]
    pub solution: Option<PathBuf>,
}

impl Input {
    fn source(&self) -> InputSource {
        match (&self.params, &self.solution) {
            (Some(p), _) => InputSource::Params(p.clone()),
            (None, Some(s)) => InputSource::Solution(s.clone()),
            (None, None) => unreachable!("clap requires one input"),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Write the solution file of a parameter set.
    Build {
        #[arg(long)]
        params: PathBuf,
    },
    /// Validate a solution and check the predicted properties.
    Check(#[command(flatten)] Input),
    /// Iterated retraction.
    Tower(#[command(flatten)] Input),
    /// Enumerate the permutation group and its series.
    Group(#[command(flatten)] Input),
    /// Brace of the permutation group: lattice, axioms, socle, φ(H).
    Brace {
        #[command(flatten)]
        input: Input,
        /// Print the basis rows of the relation lattice.
        #[arg(long)]
        dump_hnf: bool,
    },
    /// Structure group checks.
    Sg {
        #[command(flatten)]
        input: Input,
        /// Bounded search for central elements of H.
        #[arg(long)]
        probe_center: bool,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: usize,
        /// Evaluate one word, e.g. "x3 x5^-1 x0".
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Run the grid checks over every parameter block of a grid file.
    Grid {
        #[arg(long)]
        params: PathBuf,
    },
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let (command, input) = match &self.command {
            Cmd::Build { params } => (Command::Build, InputSource::Params(params.clone())),
            Cmd::Check(i) => (Command::Check, i.source()),
            Cmd::Tower(i) => (Command::Tower, i.source()),
            Cmd::Group(i) => (Command::Group, i.source()),
            Cmd::Brace { input, .. } => (Command::Brace, input.source()),
            Cmd::Sg { input, .. } => (Command::Sg, input.source()),
            Cmd::Grid { params } => (Command::Grid, InputSource::Params(params.clone())),
        };
        let mut cfg = RunConfig::new(command, input);
        cfg.cap = self.cap;
        cfg.seed = self.seed;
        cfg.timings = !self.no_timings;
        cfg.format = match self.format {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        };
        match self.command {
            Cmd::Brace { dump_hnf, .. } => cfg.dump_hnf = dump_hnf,
            Cmd::Sg {
                probe_center,
                radius,
                word,
                samples,
                ..
            } => {
                cfg.probe_center = probe_center;
                cfg.radius = radius;
                cfg.word = word;
                cfg.samples = samples;
            }
            _ => {}
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, clap::Error> {
        Cli::try_parse_from(std::iter::once("ybe").chain(args.iter().copied())).map(Cli::into_config)
    }

    #[test]
    fn one_input_is_required() {
        assert!(parse(&["check"]).is_err());
        assert!(parse(&["check", "--params", "a", "--solution", "b"]).is_err());
        let c = parse(&["tower", "--in", "s.txt"]).unwrap();
        assert_eq!(c.input, InputSource::Solution("s.txt".into()));
    }

    #[test]
    fn flags_reach_the_config() {
        let c = parse(&["sg", "--params", "p", "--probe-center", "--radius", "2", "--seed", "9", "--format", "json"]).unwrap();
        assert!(c.probe_center);
        assert_eq!((c.radius, c.seed, c.format), (2, 9, OutputFormat::Json));
        let c = parse(&["brace", "--params", "p", "--dump-hnf", "--no-timings", "--cap", "10"]).unwrap();
        assert!(c.dump_hnf && !c.timings);
        assert_eq!(c.cap, 10);
    }
}
