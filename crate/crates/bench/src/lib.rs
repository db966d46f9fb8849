//! Fixtures shared by the benchmarks.

use releq_core::builtins::load_builtin;
use releq_core::system::Model;
use releq_core::velocity::{make_root, RootKind, VelocityRoot};

/// A builtin together with one of its isolated roots.
pub fn model_and_root(spec: &str, xi: &[f64]) -> (Model, VelocityRoot) {
    let model = load_builtin(spec).expect("builtin loads");
    let root = make_root(&model, xi, RootKind::Isolated).expect("root has a kernel");
    (model, root)
}
