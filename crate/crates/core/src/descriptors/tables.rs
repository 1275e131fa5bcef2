//! Hardcoded element tables used by the surface-area and shape descriptors.

use crate::molgraph::Element;

/// Bondi van der Waals radii, Å.
pub fn vdw_radius(e: Element) -> f64 {
    match e {
        Element::H => 1.20,
        Element::B => 1.92,
        Element::C => 1.70,
        Element::N => 1.55,
        Element::O => 1.52,
        Element::F => 1.47,
        Element::Si => 2.10,
        Element::P => 1.80,
        Element::S => 1.80,
        Element::Cl => 1.75,
        Element::Br => 1.85,
        Element::I => 1.98,
    }
}

/// Single-bond covalent radii, Å.
pub fn covalent_radius(e: Element) -> f64 {
    match e {
        Element::H => 0.31,
        Element::B => 0.84,
        Element::C => 0.76,
        Element::N => 0.71,
        Element::O => 0.66,
        Element::F => 0.57,
        Element::Si => 1.11,
        Element::P => 1.07,
        Element::S => 1.05,
        Element::Cl => 1.02,
        Element::Br => 1.20,
        Element::I => 1.39,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hybridization {
    Sp3,
    Sp2,
    Sp,
    Aromatic,
}

/// Hall-Kier alpha contribution per element/hybridization.
pub fn hall_kier_alpha(e: Element, hyb: Hybridization) -> f64 {
    use Hybridization::*;
    match (e, hyb) {
        (Element::C, Sp3) => 0.0,
        (Element::C, Sp2) | (Element::C, Aromatic) => -0.13,
        (Element::C, Sp) => -0.22,
        (Element::N, Sp3) => -0.04,
        (Element::N, Sp2) | (Element::N, Aromatic) => -0.20,
        (Element::N, Sp) => -0.29,
        (Element::O, Sp3) => -0.04,
        (Element::O, Sp2) | (Element::O, Aromatic) => -0.20,
        (Element::O, Sp) => 0.0,
        (Element::F, _) => -0.07,
        (Element::Cl, _) => 0.29,
        (Element::Br, _) => 0.48,
        (Element::I, _) => 0.73,
        (Element::P, _) => 0.43,
        (Element::S, _) => 0.35,
        (Element::Si, _) => 0.38,
        (Element::B, _) => 0.24,
        (Element::H, _) => 0.0,
    }
}

/// SlogP_VSA interior bin edges (10 bins).
pub const SLOGP_EDGES: [f64; 9] = [-0.4, -0.2, 0.0, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4];

/// SMR_VSA interior bin edges (10 bins).
pub const SMR_EDGES: [f64; 9] = [1.29, 1.82, 2.24, 2.45, 2.75, 3.05, 3.63, 3.8, 4.0];
