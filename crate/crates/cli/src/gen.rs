//! `gen`: instance writers. Batches run on up to `CONIC_PROJ_THREADS`
//! worker threads; instance `i` always uses seed `seed + i`, so the output
//! does not depend on the thread count.

use std::fs;
use std::path::PathBuf;

use conproj::io::{write_dense_matrix, write_dimacs, write_polynomial, write_sdpa};
use conproj::polysos::{
    motzkin, random_graph, random_nearcorr_matrix, random_polymin_instance, random_sos_instance,
    structured_polymin, RankKind,
};
use conproj::{Error, Result};
use serde::Serialize;

use crate::args::{GenArgs, GenKind, Rank};
use crate::{thread_cap, write_output};

fn extension(kind: GenKind) -> &'static str {
    match kind {
        GenKind::Sos => "dat-s",
        GenKind::Polymin | GenKind::Structured | GenKind::Motzkin => "txt",
        GenKind::Nearcorr => "mat",
        GenKind::Graph => "col",
    }
}

fn name(kind: GenKind) -> &'static str {
    match kind {
        GenKind::Sos => "sos",
        GenKind::Polymin => "polymin",
        GenKind::Structured => "structured",
        GenKind::Motzkin => "motzkin",
        GenKind::Nearcorr => "nearcorr",
        GenKind::Graph => "graph",
    }
}

pub fn instance(a: &GenArgs, seed: u64) -> Result<String> {
    match a.kind {
        GenKind::Sos => {
            let rank = match a.rank {
                Rank::Full => RankKind::Full,
                Rank::One => RankKind::One,
            };
            write_sdpa(&random_sos_instance(a.nvars, a.degree, rank, seed)?.0)
        }
        GenKind::Polymin => Ok(write_polynomial(&random_polymin_instance(
            a.nvars, a.degree, seed,
        )?)),
        GenKind::Structured => Ok(write_polynomial(&structured_polymin(a.nvars)?)),
        GenKind::Motzkin => Ok(write_polynomial(&motzkin())),
        GenKind::Nearcorr => Ok(write_dense_matrix(&random_nearcorr_matrix(a.n, seed)?)),
        GenKind::Graph => Ok(write_dimacs(&random_graph(a.n, a.prob, seed)?)),
    }
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    kind: &'static str,
    threads: usize,
    seeds: Vec<u64>,
    files: Vec<PathBuf>,
}

pub fn run(a: GenArgs) -> Result<i32> {
    if a.count == 0 {
        return Err(Error::Input("--count must be at least 1".into()));
    }
    let seeds: Vec<u64> = (0..a.count as u64)
        .map(|i| a.seed.wrapping_add(i))
        .collect();
    if a.count == 1 && a.out.is_none() {
        write_output(None, &instance(&a, seeds[0])?)?;
        return Ok(0);
    }
    let out = a
        .out
        .clone()
        .ok_or_else(|| Error::Input("a batch needs --out <directory>".into()))?;
    let files: Vec<PathBuf> = if a.count == 1 {
        vec![out]
    } else {
        fs::create_dir_all(&out)
            .map_err(|e| Error::Input(format!("cannot create {}: {e}", out.display())))?;
        (0..a.count)
            .map(|i| out.join(format!("{}-{i:04}.{}", name(a.kind), extension(a.kind))))
            .collect()
    };

    let threads = thread_cap()?.min(a.count);
    std::thread::scope(|s| {
        let workers: Vec<_> = (0..threads)
            .map(|w| {
                let (a, seeds, files) = (&a, &seeds, &files);
                s.spawn(move || -> Result<()> {
                    for i in (w..a.count).step_by(threads) {
                        write_output(Some(&files[i]), &instance(a, seeds[i])?)?;
                    }
                    Ok(())
                })
            })
            .collect();
        workers.into_iter().try_for_each(|h| {
            h.join()
                .unwrap_or_else(|_| Err(Error::Numerical("gen worker panicked".into())))
        })
    })?;

    let summary = Summary {
        command: "gen",
        kind: name(a.kind),
        threads,
        seeds,
        files,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    write_output(None, &text)?;
    Ok(0)
}
