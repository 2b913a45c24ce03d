//! Parameter counts of every network variant.

use dccrn::model::count_parameters;
use dccrn::{ModelConfig, Summation, Variant};

fn main() {
    let base = count_parameters(&ModelConfig::adopted(Variant::BASELINE)) as f64;
    for v in Variant::table(Summation::Full) {
        let n = count_parameters(&ModelConfig::adopted(v));
        println!("{:<45} {n:>9} {:>+7.1}%", v.label(), 100.0 * (n as f64 / base - 1.0));
    }
}
