//! Complexes over `Z_p[Δ][[T]]` for a finite abelian group `Δ` whose characters take
//! values in `Z_p`, and their descent to Λ along each character.

mod character;
mod complex;
mod fp;
mod group;
mod profile;
pub mod random;

pub use character::{check_group, FiniteCharacter};
pub use complex::{
    agreement, char_components, decompose_by_characters, descent_square, evaluate_k1, leading_term_at, r_g_at,
    reassemble, torsion_class, twist, twist_equivariant, DescentReport, EquivariantComplex, EquivariantTrivialization,
    TorsionClass,
};
pub use fp::FpSeries;
pub use group::GroupSeries;
pub use profile::{meromorphic_profile, MeromorphicProfile, ProfileRow};
