//! Random equivariant pairs assembled from random plain pairs, one per character.

use std::collections::BTreeMap;

use rand::Rng;

use super::character::FiniteCharacter;
use super::complex::{reassemble, EquivariantComplex, EquivariantTrivialization};
use super::group::GroupSeries;
use crate::complex::random::{generate_from, random_pieces, Generated, GeneratorOptions, Piece};
use crate::complex::GUARD_DIGITS;
use crate::error::Result;
use crate::series::IwasawaSeries;

#[derive(Clone, Debug)]
pub struct EquivariantGenerated {
    pub complex: EquivariantComplex,
    pub trivialization: EquivariantTrivialization,
    /// The plain pair placed along each character, with its expected invariants.
    pub components: BTreeMap<FiniteCharacter, Generated>,
}

/// Every character gets pieces in the same degrees, so the components share ranks;
/// the kinds of the pieces and the conjugators are drawn independently.
pub fn random_equivariant<R: Rng + ?Sized>(
    rng: &mut R,
    p: u64,
    p_prec: u32,
    t_prec: usize,
    delta: &[u64],
    opts: &GeneratorOptions,
) -> Result<EquivariantGenerated> {
    let chars = FiniteCharacter::all(p, delta)?;
    let shape = random_pieces(rng, opts);
    let mut components = BTreeMap::new();
    let single = GeneratorOptions { max_pieces: 1, ..opts.clone() };
    for chi in chars {
        let pieces: Vec<Piece> =
            shape.iter().map(|q| Piece { degree: q.degree, kind: random_pieces(rng, &single)[0].kind }).collect();
        let g = generate_from(rng, &pieces, p, p_prec, t_prec, opts.conjugate)?;
        components.insert(chi, g);
    }
    let parts = components.iter().map(|(chi, g)| (chi.clone(), g.complex.clone())).collect();
    let complex = reassemble(p, p_prec, t_prec, delta, &parts)?;
    let units: BTreeMap<FiniteCharacter, IwasawaSeries> =
        components.iter().map(|(chi, g)| (chi.clone(), g.trivialization.unit().clone())).collect();
    let w = p_prec + GUARD_DIGITS;
    let unit = GroupSeries::from_character_components(p, t_prec, delta, &units, w)?;
    let trivialization = EquivariantTrivialization::new(unit, p, w)?;
    Ok(EquivariantGenerated { complex, trivialization, components })
}
