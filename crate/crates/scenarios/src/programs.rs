//! Source text of the case-study programs.

use xc_core::{format_real, Expr};
use xc_lang::Diagnostic;
use xc_stdlib::{compile_with, LinkOptions};

pub const SPHERE: &str = include_str!("programs/sphere.xc");
pub const TREE: &str = include_str!("programs/tree.xc");
pub const GRADIENT: &str = include_str!("programs/gradient.xc");

/// Parameters of the monitors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorParams {
    pub replicas: u32,
    /// Estimated network diameter, in meters.
    pub diameter: f64,
    /// Estimated speed of information, in meters per second.
    pub infospeed: f64,
    /// Distance within which the gradient-based monitor sees a critic
    /// device.
    pub slcs_range: f64,
}

impl Default for MonitorParams {
    fn default() -> Self {
        MonitorParams {
            replicas: 4,
            diameter: 1000.0,
            infospeed: 100.0,
            slcs_range: 975.0,
        }
    }
}

/// Outputs `pair(critic, pair(ever, pair(now_slcs, now_replicated)))`.
pub fn monitoring_source(p: &MonitorParams) -> String {
    format!(
        "// Four views of a critical situation: now here, ever, now somewhere by\n\
         // distance, now somewhere by replicated past.\n\
         val critic = sense(\"critic\");\n\
         val ever = ep(critic);\n\
         val slcs = somewhere_slcs(critic, {slcs});\n\
         val replicated = somewhere(critic, {n}, {d}, {v});\n\
         pair(critic, pair(ever, pair(slcs, replicated)))\n",
        slcs = format_real(p.slcs_range),
        n = p.replicas,
        d = format_real(p.diameter),
        v = format_real(p.infospeed),
    )
}

fn build(src: &str) -> Expr {
    compile_with(src, LinkOptions::default()).expect("built-in program compiles")
}

/// Binds `offer_rounds` in front of a propagation program.
fn with_offer(src: &str, offer_rounds: u32) -> String {
    format!("val offer_rounds = {offer_rounds};\n{src}")
}

/// Sphere propagation where devices forward during their first
/// `offer_rounds` rounds with a message.
pub fn sphere_propagation_program(offer_rounds: u32) -> Expr {
    build(&with_offer(SPHERE, offer_rounds))
}

pub fn tree_propagation_program(offer_rounds: u32) -> Expr {
    build(&with_offer(TREE, offer_rounds))
}

pub fn gradient_program() -> Expr {
    build(GRADIENT)
}

pub fn monitoring_program(p: &MonitorParams, opts: LinkOptions) -> Expr {
    compile_with(&monitoring_source(p), opts).expect("monitoring program compiles")
}

pub fn custom_program(src: &str, opts: LinkOptions) -> Result<Expr, Vec<Diagnostic>> {
    compile_with(src, opts)
}
