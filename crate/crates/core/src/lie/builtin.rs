use num_traits::Zero;

use super::{GVector, LieAlgebraModel, MatrixRealization, Sl2Triple};
use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::scalar::{int, Rational};

pub fn builtin_names() -> &'static [&'static str] {
    &["sl2", "sl3", "sl3-block", "sl3-principal", "sl4"]
}

/// Looks up a built-in algebra by name.
pub fn builtin(name: &str) -> Result<LieAlgebraModel> {
    match name {
        "sl2" => sl_n(2),
        "sl3" | "sl3-block" => {
            let mut m = sl_n(3)?;
            if name == "sl3-block" {
                m.name = "sl3-block".into();
            }
            Ok(m)
        }
        "sl3-principal" => sl3_with_principal_triple(),
        "sl4" => sl_n(4),
        other => Err(Error::InvalidArgument(format!(
            "unknown algebra {other:?}; built-ins are {}",
            builtin_names().join(", ")
        ))),
    }
}

fn unit(n: usize, i: usize, j: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    m[(i, j)] = int(1);
    m
}

/// sl_n with the integral basis E_ij (i<j), H_k = E_kk − E_{k+1,k+1}, E_ij (i>j),
/// lattice = integral traceless matrices and the block triple (E_12, H_1, E_21).
pub fn sl_n(n: usize) -> Result<LieAlgebraModel> {
    if n < 2 {
        return Err(Error::InvalidArgument("sl_n needs n >= 2".into()));
    }
    let mut names = Vec::new();
    let mut mats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            names.push(format!("E{}{}", i + 1, j + 1));
            mats.push(unit(n, i, j));
        }
    }
    for k in 0..n - 1 {
        names.push(format!("H{}", k + 1));
        let mut h = unit(n, k, k);
        h[(k + 1, k + 1)] = int(-1);
        mats.push(h);
    }
    for i in 0..n {
        for j in 0..i {
            names.push(format!("E{}{}", i + 1, j + 1));
            mats.push(unit(n, i, j));
        }
    }
    let dim = mats.len();
    let real = MatrixRealization::new(n, mats.clone())?;
    let mut constants = Vec::new();
    for a in 0..dim {
        for b in a + 1..dim {
            let mut comm = mats[a].mul(&mats[b])?;
            let ba = mats[b].mul(&mats[a])?;
            for i in 0..n {
                for j in 0..n {
                    comm[(i, j)] -= &ba[(i, j)];
                }
            }
            let c = real.from_matrix(&comm)?;
            for (k, v) in c.coords.into_iter().enumerate() {
                if !v.is_zero() {
                    constants.push((a, b, k, v));
                }
            }
        }
    }
    let idx = |s: &str| names.iter().position(|x| x == s).expect("basis name");
    let triple = Sl2Triple {
        e: GVector::basis(dim, idx("E12")),
        h: GVector::basis(dim, idx("H1")),
        f: GVector::basis(dim, idx("E21")),
    };
    LieAlgebraModel::new(format!("sl{n}"), names, &constants, None, Some(triple), Some(real))
}

/// sl3 with the principal (irreducible) triple E = E12+E23, H = diag(2,0,−2), F = 2E21+2E32.
pub fn sl3_with_principal_triple() -> Result<LieAlgebraModel> {
    let base = sl_n(3)?;
    let dim = base.dim();
    let mut e = GVector::<Rational>::zeros(dim);
    let mut h = GVector::<Rational>::zeros(dim);
    let mut f = GVector::<Rational>::zeros(dim);
    let i = |s: &str| base.basis_index(s).expect("basis name");
    e.coords[i("E12")] = int(1);
    e.coords[i("E23")] = int(1);
    h.coords[i("H1")] = int(2);
    h.coords[i("H2")] = int(2);
    f.coords[i("E21")] = int(2);
    f.coords[i("E32")] = int(2);
    base.with_triple("sl3-principal", Sl2Triple { e, h, f })
}
