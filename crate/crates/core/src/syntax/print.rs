use super::{Flavor, HyperTslFormula};

/// Renders a HyperTSL formula in the `.htsl` syntax.
///
/// The rel flavor is recorded in a header line so that parsing the output
/// yields the same formula.
pub fn print_property(f: &HyperTslFormula) -> String {
    let mut out = String::new();
    if f.flavor == Flavor::Rel {
        out.push_str("flavor: rel\n");
    }
    out.push_str(&f.to_string());
    out
}
