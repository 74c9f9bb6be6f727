//! `crest simulate`: synthetic rating-list CSVs drawn from the model,
//! byte-identical for a fixed seed.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use crest_core::data::{write_rating_csv, RatingList, RatingRecord, Sex};
use crest_core::model::ThresholdModel;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Tail index
    #[arg(long)]
    pub a: f64,
    /// Scale, in score points
    #[arg(long)]
    pub theta: f64,
    /// Threshold
    #[arg(long, default_value_t = 2100)]
    pub r0: i64,
    /// Number of players to generate
    #[arg(long)]
    pub n: usize,
    /// RNG seed (required: output must be reproducible)
    #[arg(long)]
    pub seed: u64,
    /// Sex code written on every generated record
    #[arg(long, default_value = "M")]
    pub sex: String,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append rows (no header) to an existing file
    #[arg(long, default_value_t = false, requires = "out")]
    pub append: bool,
}

pub fn run(args: SimulateArgs) -> Result<()> {
    let sex: Sex = args.sex.parse()?;
    let model = ThresholdModel::new(args.r0 as f64, args.a, args.theta)?;
    let draws = model.sample(args.n, args.seed);

    let records: Vec<RatingRecord> = draws
        .iter()
        .enumerate()
        .map(|(i, &x)| RatingRecord {
            player_id: format!("{sex}{:06}", i + 1),
            name: format!("Player {sex}{:06}", i + 1),
            federation: "SIM".to_string(),
            sex,
            // Published ratings are integers; round half up and clamp to
            // the threshold so no draw falls below it.
            rating: (x.round() as i64).max(args.r0),
            active: true,
        })
        .collect();
    let list = RatingList {
        records,
        source: "simulate".to_string(),
    };

    match &args.out {
        Some(path) => {
            if args.append {
                let mut buf = Vec::new();
                write_rating_csv(&list, &mut buf)?;
                let body = strip_header(&buf);
                let mut file = std::fs::OpenOptions::new()
                    .append(true)
                    .open(path)
                    .with_context(|| format!("cannot append to '{}'", path.display()))?;
                file.write_all(body)?;
            } else {
                let file = std::fs::File::create(path)
                    .with_context(|| format!("cannot write '{}'", path.display()))?;
                write_rating_csv(&list, file)?;
            }
        }
        None => {
            let mut buf = Vec::new();
            write_rating_csv(&list, &mut buf)?;
            crate::support::write_stdout(&buf)?;
        }
    }
    Ok(())
}

fn strip_header(buf: &[u8]) -> &[u8] {
    match buf.iter().position(|&b| b == b'\n') {
        Some(i) => &buf[i + 1..],
        None => &[],
    }
}
