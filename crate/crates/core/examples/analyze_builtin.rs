//! Run the full analysis on a builtin and print the text report.
//!
//! `cargo run --release -p releq-core --example analyze_builtin -- coupled_oscillators`

use releq_core::builtins::load_builtin;
use releq_core::pipeline::{run_pipeline, PipelineOptions};
use releq_core::report::Format;

fn main() -> releq_core::Result<()> {
    let spec = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let model = load_builtin(if spec.is_empty() {
        "motivating_s1"
    } else {
        &spec
    })?;
    let start = std::time::Instant::now();
    let report = run_pipeline(&model, &PipelineOptions::default());
    print!("{}", report.emit(Format::Text));
    eprintln!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
