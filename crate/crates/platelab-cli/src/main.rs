//! `platelab` command-line front end.
//!
//! Every option can also be given in a flat `key = value` file passed with
//! `--config`; flags win over the file. Exit codes: 0 all checks pass,
//! 1 a mathematical check failed, 2 configuration error.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};

use commands::*;
use config::{normalize_key, parse_config, ConfigError, Params};

type Runner = fn(&Params) -> CmdResult;

struct CommandDef {
    name: &'static str,
    about: &'static str,
    keys: Vec<&'static str>,
    run: Runner,
}

fn keys(groups: &[&[&'static str]]) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn command_defs() -> Vec<CommandDef> {
    vec![
        CommandDef {
            name: "ls-check",
            about: "Lopatinskii-Sapiro check of a boundary pair, with and without weight, against the rank oracle",
            keys: keys(&[LS_KEYS]),
            run: ls_check,
        },
        CommandDef {
            name: "roots",
            about: "Roots and root configuration of the conjugated quartic at one point",
            keys: keys(&[ROOTS_KEYS]),
            run: roots,
        },
        CommandDef {
            name: "subell",
            about: "Sub-ellipticity margins of a weight at a given gamma",
            keys: keys(&[WEIGHT_KEYS, SUBELL_KEYS]),
            run: subell,
        },
        CommandDef {
            name: "gamma-search",
            about: "Least gamma for sub-ellipticity, then mu for the positivity bound",
            keys: keys(&[WEIGHT_KEYS, GAMMA_KEYS]),
            run: gamma_search_cmd,
        },
        CommandDef {
            name: "assemble",
            about: "Assemble a discrete plate operator and write it as columnar text",
            keys: keys(&[OPERATOR_KEYS, &["count"]]),
            run: assemble_cmd,
        },
        CommandDef {
            name: "spectrum",
            about: "Lowest eigenvalues of a discrete plate operator",
            keys: keys(&[OPERATOR_KEYS, &["count"]]),
            run: spectrum_cmd,
        },
        CommandDef {
            name: "simulate",
            about: "Implicit midpoint integration of the damped plate; energy log CSV",
            keys: keys(&[OPERATOR_KEYS, DAMPING_KEYS, SIM_KEYS]),
            run: simulate_cmd,
        },
        CommandDef {
            name: "resolvent",
            about: "Resolvent norm sweep along the imaginary axis; table and fitted C",
            keys: keys(&[OPERATOR_KEYS, DAMPING_KEYS, RESOLVENT_KEYS]),
            run: resolvent_cmd,
        },
        CommandDef {
            name: "decay-fit",
            about: "Fit the logarithmic decay constant to an energy log",
            keys: keys(&[DECAY_KEYS]),
            run: decay_fit_cmd,
        },
        CommandDef {
            name: "catalog",
            about: "List the catalog boundary pairs, or print one in pair-file format",
            keys: keys(&[CATALOG_KEYS]),
            run: catalog_cmd,
        },
    ]
}

fn cli(command_defs: &[CommandDef]) -> Command {
    let mut cmd = Command::new("platelab")
        .about("Boundary-condition checks, Carleman weights and damped plate experiments")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for s in command_defs {
        let mut sub = Command::new(s.name)
            .about(s.about)
            .arg(Arg::new("config").long("config").value_name("FILE").help("key = value file; flags override it"))
            .arg(Arg::new("out").long("out").value_name("FILE").help("write the artifact here instead of stdout"));
        for k in &s.keys {
            sub = sub.arg(Arg::new(*k).long(*k).value_name("VALUE").allow_hyphen_values(true).action(ArgAction::Set));
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn resolve(desc: &CommandDef, m: &ArgMatches) -> Result<(Params, Option<String>), ConfigError> {
    let mut file = match m.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("--config {path}: {e}")))?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    let out_from_file = file.remove("out").map(|v| v.0);
    let mut flags = BTreeMap::new();
    for k in &desc.keys {
        if let Some(v) = m.get_one::<String>(k) {
            flags.insert(normalize_key(k), v.clone());
        }
    }
    let params = Params::merge(&desc.keys, file, flags)?;
    Ok((params, m.get_one::<String>("out").cloned().or(out_from_file)))
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("PLATELAB_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| ConfigError(format!("PLATELAB_THREADS: cannot parse `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("PLATELAB_THREADS: {e}")))
}

fn main() -> ExitCode {
    let command_defs = command_defs();
    let matches = cli(&command_defs).get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let desc = command_defs.iter().find(|s| s.name == name).expect("known subcommand");
    let run = || -> Result<(Outcome, Option<String>), CmdError> {
        configure_threads()?;
        let (params, out) = resolve(desc, sub)?;
        Ok(((desc.run)(&params)?, out))
    };
    match run() {
        Ok((outcome, out)) => {
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &outcome.text) {
                        eprintln!("error: --out {path}: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{}", outcome.text),
            }
            eprintln!("{}", outcome.summary);
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(CmdError::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(CmdError::Numerical(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
