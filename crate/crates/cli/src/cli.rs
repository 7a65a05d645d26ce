use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ppeps", version, about = "Plaquette PEPS circuits, tensor networks and their checks")]
pub struct Cli {
    /// Numerical tolerance for fidelities and residuals.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Amplitude cap for dense states (overrides PPEPS_MAX_AMPLITUDES).
    #[arg(long, global = true)]
    pub max_amplitudes: Option<usize>,

    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    /// Write a run manifest (inputs, seeds, outputs with SHA-256) here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a circuit and write it as JSON.
    Gen(GenArgs),
    /// Layerize a circuit and compare its depth with the asymptotic formula.
    Schedule(ScheduleArgs),
    /// Simulate a circuit file into a binary state file.
    Simulate(SimulateArgs),
    /// Convert a circuit to an arrowed tensor network, or its gates to PEPOs.
    Convert(ConvertArgs),
    /// Run isometry, inclusion, disentanglement and entropy checks.
    Verify(VerifyArgs),
    /// Run the photon-source array protocol.
    Photonic(PhotonicArgs),
    /// Local expectations and correlations from reverse light cones.
    Lightcone(LightconeArgs),
    /// Gate counts for sequential vs brickwall long-range correlations.
    CompareBrickwall(BrickwallArgs),
    /// Write plot data (depth scans, gate counts) into a directory.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    RpPeps,
    PPeps,
    Isotns,
    Fpeps,
    Sgs,
    Ghz,
    Cluster,
    Brickwall,
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArgs {
    /// Lattice size such as `3x3`, `12` or `4x4x4`.
    #[arg(long)]
    pub size: String,
    /// Local dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: GenFamily,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Plaquette size.
    #[arg(long, default_value_t = 2)]
    pub lp: usize,
    /// Bond dimension for isotns / fpeps.
    #[arg(long = "bond-dim", default_value_t = 2)]
    pub bond_dim: usize,
    /// Source point `i,j` (defaults to the origin).
    #[arg(long)]
    pub source: Option<String>,
    /// Preferred direction such as `+1,-0`.
    #[arg(long)]
    pub preferred: Option<String>,
    /// Orthogonality center: `corner` or `i,j`.
    #[arg(long, default_value = "corner")]
    pub oc: String,
    /// Brickwall sweeps.
    #[arg(long, default_value_t = 1)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use identity gates instead of seeded ones.
    #[arg(long)]
    pub identity: bool,
    /// Output path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScheduleFamily {
    RpPeps,
    Isotns,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    /// Circuit file; otherwise the geometry is built from the flags below.
    #[arg(long, conflicts_with_all = ["family", "size"])]
    pub circuit: Option<PathBuf>,
    #[arg(long, value_enum, requires = "size")]
    pub family: Option<ScheduleFamily>,
    #[arg(long)]
    pub size: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub lp: usize,
    #[arg(long = "bond-dim", default_value_t = 2)]
    pub bond_dim: usize,
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub preferred: Option<String>,
    #[arg(long, default_value = "corner")]
    pub oc: String,
    /// Include the layer-by-layer gate indices.
    #[arg(long)]
    pub layers: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Decompose each plaquette gate into a PEPO instead.
    #[arg(long)]
    pub pepo: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `sgs-rppeps`, `sgs-isotns`, `isotns-rppeps` or `fpeps-ppeps`.
    #[arg(long)]
    pub inclusion: Option<String>,
    /// Isometry check of the network converted from `--circuit`.
    #[arg(long, requires = "circuit")]
    pub isometries: bool,
    /// Straight-cut entropy bounds for `--circuit`.
    #[arg(long, requires = "circuit")]
    pub entropy: bool,
    /// Source disentanglement of a seeded photonic run of `--size`.
    #[arg(long)]
    pub disentanglement: bool,
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[arg(long, default_value = "3x3")]
    pub size: String,
    #[arg(long, default_value_t = 2)]
    pub lp: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhotonicFamily {
    RpPeps,
    Isotns,
    Fpeps,
    Ghz,
}

#[derive(Args, Debug)]
pub struct PhotonicArgs {
    #[arg(long, value_enum, default_value = "rp-peps")]
    pub family: PhotonicFamily,
    /// `n x m` lattice; for `ghz` the number of photons.
    #[arg(long)]
    pub size: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub lp: usize,
    #[arg(long = "bond-dim", default_value_t = 2)]
    pub bond_dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub identity: bool,
    /// Stop before the ancillas are swapped out (fault injection).
    #[arg(long)]
    pub no_swap: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LocalOp {
    Z,
    X,
}

#[derive(Args, Debug)]
pub struct LightconeArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, value_enum, default_value = "z")]
    pub op: LocalOp,
    /// Second operator of each pair (defaults to `--op`).
    #[arg(long, value_enum)]
    pub op_b: Option<LocalOp>,
    /// Single-site expectation at `i,j`.
    #[arg(long, conflicts_with = "pairs")]
    pub site: Option<String>,
    /// Pairs `i,j:k,l;...` for a connected-correlator scan (CSV output).
    #[arg(long)]
    pub pairs: Option<String>,
    /// Also compare with the full simulation.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BrickwallArgs {
    #[arg(long)]
    pub size: String,
    #[arg(long, default_value_t = 2)]
    pub lp: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Largest side length in the depth scan.
    #[arg(long, default_value_t = 40)]
    pub max_side: usize,
}
