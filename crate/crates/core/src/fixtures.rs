//! Built-in example media: four cubic media, four rhombic media and the
//! exceptional medium, all with `γ = 1/2`, `κ = 1`.

use serde::Serialize;

use crate::media::Moduli;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub medium: Moduli,
}

fn thermal(m: Moduli) -> Moduli {
    m.with_thermal(0.5, 1.0).expect("valid thermal constants")
}

pub fn figure_fixtures() -> Vec<Fixture> {
    let cubic = |name, tau, lambda| Fixture { name, medium: thermal(Moduli::cubic(tau, lambda, 1.0)) };
    let rhombic = |name, tau1, tau2| Fixture {
        name,
        medium: thermal(Moduli::rhombic(tau1, tau2, 0.5, 1.0)),
    };
    vec![
        cubic("cubic-soft", 0.5, 0.0),
        cubic("cubic-stiff", 2.5, 0.0),
        cubic("cubic-soft-neg", 0.5, -2.0),
        cubic("cubic-stiff-neg", 2.5, -2.0),
        rhombic("rhombic-eight", 4.0, 8.0),
        Fixture { name: "rhombic-four", medium: thermal(Moduli::rhombic(1.0 / 3.0, 8.0, 1.0, 1.0)) },
        rhombic("rhombic-flat", 2.5, 8.0),
        rhombic("rhombic-quarter", 2.5, 1.5),
        Fixture { name: "exceptional", medium: thermal(Moduli::exceptional(0.0, 1.0)) },
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    figure_fixtures().into_iter().find(|f| f.name == name)
}
