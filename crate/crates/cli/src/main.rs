mod cli;
mod manifest;
mod run;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::Parser;
use ppeps::Exec;

use cli::{Cli, Command};
use manifest::{artifacts, RunManifest};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Schedule(_) => "schedule",
        Command::Simulate(_) => "simulate",
        Command::Convert(_) => "convert",
        Command::Verify(_) => "verify",
        Command::Photonic(_) => "photonic",
        Command::Lightcone(_) => "lightcone",
        Command::CompareBrickwall(_) => "compare-brickwall",
        Command::Report(_) => "report",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cap) = cli.max_amplitudes {
        ppeps::statevector::set_memory_cap(Some(cap));
    }
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let mut ctx = run::Ctx { exec, tol: cli.tol, inputs: Vec::new(), outputs: Vec::new(), seeds: Vec::new() };
    let result = match &cli.command {
        Command::Gen(a) => run::gen(&mut ctx, a),
        Command::Schedule(a) => run::schedule(&mut ctx, a),
        Command::Simulate(a) => run::simulate(&mut ctx, a),
        Command::Convert(a) => run::convert(&mut ctx, a),
        Command::Verify(a) => run::verify(&mut ctx, a),
        Command::Photonic(a) => run::photonic(&mut ctx, a),
        Command::Lightcone(a) => run::lightcone(&mut ctx, a),
        Command::CompareBrickwall(a) => run::compare_brickwall(&mut ctx, a),
        Command::Report(a) => run::report(&mut ctx, a),
    };
    let (code, pass, error) = match result {
        Ok(true) => (0u8, Some(true), None),
        Ok(false) => (1, Some(false), None),
        Err(e) => {
            eprintln!("error: {e}");
            (2, None, Some(e.to_string()))
        }
    };
    if let Some(path) = &cli.manifest {
        let m = RunManifest {
            command: command_name(&cli.command).into(),
            args: std::env::args().skip(1).collect(),
            inputs: artifacts(&ctx.inputs).unwrap_or_default(),
            seeds: ctx.seeds.clone(),
            tolerances: BTreeMap::from([("tol".to_string(), cli.tol), ("isometry".to_string(), 1e-12)]),
            outputs: artifacts(&ctx.outputs).unwrap_or_default(),
            pass,
            error,
        };
        if let Err(e) = ppeps::io::write_json(path, &m) {
            eprintln!("error: cannot write manifest: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
