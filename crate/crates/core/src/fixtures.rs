//! Standard presentations used across tests, demos, and the acceptance suite.

use crate::words::{Alphabet, Presentation};

fn build(names: &[&str], relators: &[&str]) -> Presentation {
    let alphabet = Alphabet::from_names(names);
    let rs = relators
        .iter()
        .map(|s| alphabet.parse_word(s).expect("fixture word parses"))
        .collect();
    Presentation::new(alphabet, rs).expect("fixture presentation is valid")
}

/// The two-generator lattice presentation `<a, b | abAB>`.
pub fn z2() -> Presentation {
    build(&["a", "b"], &["abAB"])
}

/// `<a, b | ababaBABAB>`: the length-ten relator whose symmetric closure has
/// twenty elements, four of which begin with `ab`.
pub fn running_example() -> Presentation {
    build(&["a", "b"], &["ababaBABAB"])
}

/// The free group of rank two, `<a, b | >`.
pub fn free_rank2() -> Presentation {
    build(&["a", "b"], &[])
}

/// `<a | aaaa>`: cyclic of order four.
pub fn single_square() -> Presentation {
    build(&["a"], &["aaaa"])
}

/// `<a, b | abab>`: its symmetric closure shares no prefixes, so the piece
/// set is empty.
pub fn abab() -> Presentation {
    build(&["a", "b"], &["abab"])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_construct() {
        assert_eq!(z2().relators().len(), 1);
        assert_eq!(running_example().relators()[0].len(), 10);
        assert!(free_rank2().relators().is_empty());
        assert_eq!(single_square().alphabet().size(), 1);
        assert_eq!(abab().relators()[0].len(), 4);
    }
}
