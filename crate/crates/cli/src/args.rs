use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact computations with Witt vectors, F-crystals, K3 crystals and formal group laws.
#[derive(Parser, Debug)]
#[command(name = "crystalline", version, propagate_version = true)]
pub struct Cli {
    /// Seed for every randomized verb.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Emit interchange documents instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for the library's parallel loops.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Default p-adic precision for verbs that take one.
    #[arg(long, global = true, env = "CRYSTALLINE_PRECISION")]
    pub precision: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Arithmetic in W_n(F_q).
    #[command(subcommand)]
    Witt(WittCmd),
    /// Newton/Hodge polygon comparison.
    #[command(subcommand)]
    Polygon(PolygonCmd),
    /// F-crystals over W(F_q).
    #[command(subcommand)]
    Crystal(CrystalCmd),
    /// Quadratic forms over F_p and Z_p.
    #[command(subcommand)]
    Form(FormCmd),
    /// Supersingular K3 crystals and their period coordinates.
    #[command(subcommand)]
    K3(K3Cmd),
    /// One-dimensional formal group laws.
    #[command(subcommand)]
    Fgl(FglCmd),
    /// Supersingular elliptic curves over F_{p²} and their mass.
    Census {
        #[arg(long)]
        p: u64,
    },
    /// Frobenius on H²(O) of a quartic surface.
    #[command(subcommand)]
    Quartic(QuarticCmd),
    /// Cycle classes of height and Artin strata.
    #[command(subcommand)]
    Strata(StrataCmd),
    /// Consistency checks between invariants.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Parse, validate and re-serialize interchange documents.
    Validate {
        /// Documents to check ("-" for stdin).
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Run the acceptance criteria.
    Acceptance {
        /// "all" or one of witt, crystal, k3, fgl, census, quartic, strata, shapes.
        #[arg(default_value = "all")]
        suite: String,
        /// Corrupt one structure polynomial first; the witt suite must then fail.
        #[arg(long)]
        tamper: bool,
    },
}

/// An operand: a file path, "-" for stdin, or an inline JSON document.
pub type Operand = String;

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u64,
    /// Degree a of F_q over F_p.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
}

#[derive(Subcommand, Debug)]
pub enum WittCmd {
    /// Sum of two Witt vectors over the same field.
    Add { a: Operand, b: Operand },
    /// Product of two Witt vectors over the same field.
    Mul { a: Operand, b: Operand },
    /// Frobenius, raising every component to the p-th power.
    Frob { a: Operand },
    /// Verschiebung, shifting components up by one.
    Versch { a: Operand },
    /// Ghost components of a Witt vector over Q (the ghost map is not injective in characteristic p).
    Ghost {
        #[arg(long)]
        p: u64,
        /// Coordinates x0,x1,… as integers or fractions a/b.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coords: Vec<String>,
    },
    /// The image of an integer in W_n(F_q).
    Fromint {
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: usize,
    },
    /// A uniformly random element of W_n(F_q).
    Random {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum PolygonCmd {
    /// Whether UPPER lies on or above LOWER with equal endpoints.
    Compare { upper: Operand, lower: Operand },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StandardKind {
    #[value(name = "M", alias = "m")]
    M,
    #[value(name = "N", alias = "n")]
    N,
}

#[derive(Subcommand, Debug)]
pub enum CrystalCmd {
    /// Hodge numbers from the elementary divisors of Frobenius.
    Hodge { crystal: Operand },
    /// Newton slopes with multiplicities; fails if the precision cannot certify them.
    Newton { crystal: Operand },
    /// Rank of the Tate module, the multiplicity of slope 0.
    Tate { crystal: Operand },
    /// Whether the Newton polygon lies on or above the Hodge polygon.
    Mazur { crystal: Operand },
    /// The standard crystal M_{r/s} or N_{r/s}.
    Standard {
        #[arg(long, value_enum)]
        kind: StandardKind,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
        #[command(flatten)]
        field: FieldArgs,
        /// Precision; falls back to --precision, then 8.
        #[arg(long)]
        n: Option<u32>,
    },
    /// A random crystal with Hodge exponents at most MAX_EXP.
    Random {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 2)]
        max_exp: u32,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
pub enum FormCmd {
    /// Discriminant class of an F_p form.
    Disc { form: Operand },
    /// Witt index and anisotropic kernel of an F_p form.
    Split { form: Operand },
    /// Whether the form is neutral, with a totally isotropic subspace of half dimension.
    Neutral { form: Operand },
    /// Hasse invariant of a Z_p lattice.
    Hasse { lattice: Operand },
    /// Jordan splitting p·G0 ⊥ G1 of a Z_p lattice.
    Jordan { lattice: Operand },
    /// The local supersingular K3 lattice p·G0 ⊥ G1 with rank G0 = 2σ0.
    Sslattice {
        #[arg(long)]
        sigma0: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: Option<u32>,
    },
    /// The non-neutral F_p form of dimension 2σ0.
    Nonneutral {
        #[arg(long)]
        sigma0: u32,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum K3Cmd {
    /// Checks each K3 crystal axiom separately.
    Axioms { crystal: Operand },
    /// Whether every Newton slope equals 1.
    Ss { crystal: Operand },
    /// Artin invariant σ0 of a supersingular K3 crystal.
    Artin { crystal: Operand },
    /// The characteristic subspace of a supersingular K3 crystal.
    Periods { crystal: Operand },
    /// Build a K3 crystal from a characteristic subspace or period coordinates.
    Frompc {
        periods: Operand,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Count characteristic subspaces over F_{p^m} exhaustively.
    Enumerate {
        #[arg(long)]
        sigma0: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
    },
    /// A random strictly characteristic subspace over F_{p^m}.
    Sample {
        #[arg(long)]
        sigma0: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
    },
}

/// Where a formal group law comes from: a document or one of the built-in laws.
#[derive(Args, Debug, Clone)]
pub struct LawSource {
    /// Formal group law document.
    pub law: Option<Operand>,
    #[arg(long, conflicts_with_all = ["law", "ga", "elliptic"])]
    pub gm: bool,
    #[arg(long, conflicts_with_all = ["law", "elliptic"])]
    pub ga: bool,
    /// Weierstrass coefficients a1,a2,a3,a4,a6.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "law")]
    pub elliptic: Option<Vec<i64>>,
    /// Base field F_p; omit for Q.
    #[arg(long)]
    pub p: Option<u64>,
    /// Truncation order; defaults to what the verb needs.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum FglCmd {
    /// The multiplicative law x + y + xy.
    Gm {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 10)]
        n: u32,
    },
    /// The additive law x + y.
    Ga {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 10)]
        n: u32,
    },
    /// The formal group of a Weierstrass curve.
    Elliptic {
        /// a1,a2,a3,a4,a6.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        a: Vec<i64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 10)]
        n: u32,
    },
    Height {
        #[command(flatten)]
        source: LawSource,
        /// Search bound; needs truncation order p^max_h. Defaults to 2 for elliptic laws, else 4.
        #[arg(long)]
        max_h: Option<u32>,
    },
    /// The logarithm over Q.
    Log {
        #[command(flatten)]
        source: LawSource,
    },
    /// The series `[k](x)`.
    Mulbyn {
        #[command(flatten)]
        source: LawSource,
        #[arg(long)]
        k: u64,
    },
    /// The Dieudonné crystal of a height-h formal group.
    Cartier {
        #[arg(long)]
        h: u32,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
pub enum QuarticCmd {
    /// Coefficient of (x0x1x2x3)^{p−1} in f^{p−1}.
    H2 {
        #[arg(long)]
        p: u64,
        /// File holding a polynomial such as `x0^4 + x1^4 - 2*x2^2*x3^2`, or "-".
        #[arg(long)]
        poly: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum StrataCmd {
    /// Class of M_i (height ≥ i), of M_∞ (--i inf), or of M_{∞,i} (--artin).
    Class {
        #[arg(long)]
        i: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        artin: bool,
    },
    /// Cosets of the stabiliser of 1 in the symmetric permutations of 1..21.
    Cosets,
}

#[derive(Subcommand, Debug)]
pub enum CheckCmd {
    /// Picard rank against the height of the formal Brauer group.
    Iam {
        #[arg(long)]
        rho: u32,
        /// 1..=10 or "inf".
        #[arg(long)]
        height: String,
    },
}
