//! Lists the presets with their predicted dimensions.

use rbm_trace::harness::preset_catalog;

fn main() {
    for e in preset_catalog() {
        println!("{:<24} {:.4}  {}", e.name, e.predicted, e.citation);
    }
}
