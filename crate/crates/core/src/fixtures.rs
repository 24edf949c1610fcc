//! Worked examples shipped with the crate, in the JSON document format.

use crate::des::Des;
use crate::io::parse_des;

/// All events observable; state 2 secret, state 4 nonsecret, others neutral.
pub const FIG1: &str = include_str!("../fixtures/fig1.des");
/// `FIG1` with event `c` unobservable.
pub const FIG2: &str = include_str!("../fixtures/fig2.des");
/// Chain `1 -a-> 2 -u-> 3 -a-> 4` with secret state 2.
pub const FIG5: &str = include_str!("../fixtures/fig5.des");
/// Non-normal system used to illustrate normalization.
pub const FIG6: &str = include_str!("../fixtures/fig6.des");
/// Normal system that is not strongly one-step opaque.
pub const FIG8: &str = include_str!("../fixtures/fig8.des");
/// `FIG8` with `(4,c,2)` and `(8,c,6)` redirected to `3` and `7`.
pub const FIG10: &str = include_str!("../fixtures/fig10.des");

pub const ALL: [(&str, &str); 6] = [
    ("fig1", FIG1),
    ("fig2", FIG2),
    ("fig5", FIG5),
    ("fig6", FIG6),
    ("fig8", FIG8),
    ("fig10", FIG10),
];

fn load(text: &str) -> Des {
    parse_des(text).expect("bundled fixture is valid")
}

pub fn fig1() -> Des {
    load(FIG1)
}

pub fn fig2() -> Des {
    load(FIG2)
}

pub fn fig5() -> Des {
    load(FIG5)
}

pub fn fig6() -> Des {
    load(FIG6)
}

pub fn fig8() -> Des {
    load(FIG8)
}

pub fn fig10() -> Des {
    load(FIG10)
}
