use super::matrix::{ComplexMatrix, Dims, C64};
use crate::error::{Error, Result};

/// Kronecker product; the first factor is the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for k in 0..ac {
            let aik = a[(i, k)];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..br {
                for l in 0..bc {
                    out[(i * br + j, k * bc + l)] = aik * b[(j, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_indices(dims: &Dims, indices: &[usize]) -> Result<()> {
    for &i in indices {
        if i >= dims.len() {
            return Err(Error::SubsystemOutOfRange {
                index: i,
                count: dims.len(),
            });
        }
    }
    Ok(())
}

/// Reduced operator on the subsystems listed in `keep`, in ascending order.
///
/// Returns the reduced matrix together with the dims of the kept factors.
pub fn partial_trace(m: &ComplexMatrix, dims: &Dims, keep: &[usize]) -> Result<(ComplexMatrix, Dims)> {
    dims.check_matrix(m)?;
    check_indices(dims, keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        let t = m.trace();
        let mut out = ComplexMatrix::zeros(1, 1);
        out[(0, 0)] = t;
        return Ok((out, Dims::new(vec![1])?));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let kept_dims = Dims::new(kept.iter().map(|&i| dims.as_slice()[i]).collect())?;
    let n = dims.total();
    let side = kept_dims.total();
    let mut out = ComplexMatrix::zeros(side, side);

    let all_digits: Vec<Vec<usize>> = (0..n).map(|i| dims.digits(i)).collect();
    let reduced_index: Vec<usize> = all_digits
        .iter()
        .map(|d| {
            let sub: Vec<usize> = kept.iter().map(|&k| d[k]).collect();
            kept_dims.flatten(&sub)
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            let same_traced = traced.iter().all(|&t| all_digits[i][t] == all_digits[j][t]);
            if same_traced {
                out[(reduced_index[i], reduced_index[j])] += m[(i, j)];
            }
        }
    }
    Ok((out, kept_dims))
}

/// Transpose with respect to one tensor factor.
///
/// Element `((i,j),(k,l))` moves to `((i,l),(k,j))` for the second factor of a
/// bipartite system; the general case swaps the chosen factor's row and
/// column digits.
pub fn partial_transpose(m: &ComplexMatrix, dims: &Dims, subsystem: usize) -> Result<ComplexMatrix> {
    dims.check_matrix(m)?;
    check_indices(dims, &[subsystem])?;
    let n = dims.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let di = dims.digits(i);
        for j in 0..n {
            let dj = dims.digits(j);
            let mut ri = di.clone();
            let mut rj = dj.clone();
            ri[subsystem] = dj[subsystem];
            rj[subsystem] = di[subsystem];
            out[(dims.flatten(&ri), dims.flatten(&rj))] = m[(i, j)];
        }
    }
    Ok(out)
}
