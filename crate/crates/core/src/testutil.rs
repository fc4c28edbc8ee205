use rand::Rng;

use crate::field::WignerField;
use crate::lattice::BrillouinGrid;
use crate::spin2::{expi, HermitianMatrix2, Mat2, C64};

pub fn random_herm(rng: &mut impl Rng) -> HermitianMatrix2 {
    HermitianMatrix2::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    )
}

pub fn random_unitary(rng: &mut impl Rng) -> Mat2 {
    expi(&random_herm(rng), rng.gen_range(0.0..3.0))
}

/// A field with eigenvalues in `[0.05, 0.95]` and independent random axes.
pub fn random_fermi_field(rng: &mut impl Rng, grid: BrillouinGrid) -> WignerField {
    WignerField::from_fn(grid, |_| {
        let u = random_unitary(rng);
        HermitianMatrix2::diagonal(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95))
            .conjugated(&u)
    })
}
