use super::{require_square, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Trace over the leading (game) tensor factor of an operator on
/// `C^{n_game} ⊗ C^{d_env}`.
pub fn partial_trace_game<T: Real>(o: &CMatrix<T>, n_game: usize, d_env: usize) -> Result<CMatrix<T>> {
    let dim = require_square(o, "partial trace argument")?;
    if dim != n_game * d_env {
        return Err(Error::Shape(format!(
            "partial trace expects dimension {n_game}*{d_env} = {}, got {dim}",
            n_game * d_env
        )));
    }
    let mut out = CMatrix::zeros(d_env, d_env);
    for g in 0..n_game {
        out += o.view((g * d_env, g * d_env), (d_env, d_env));
    }
    Ok(out)
}

/// Reorders the tensor factors of a square operator.
///
/// `dims` lists the factor dimensions from outermost to innermost; factor `t`
/// of the result is factor `perm[t]` of the input. The reindexing is a
/// permutation similarity `P A Pᵀ`.
pub fn permute_subsystems<T: Real>(a: &CMatrix<T>, dims: &[usize], perm: &[usize]) -> Result<CMatrix<T>> {
    let dim = require_square(a, "subsystem permutation argument")?;
    let total: usize = dims.iter().product();
    if total != dim {
        return Err(Error::Shape(format!(
            "factor dimensions {dims:?} multiply to {total}, matrix has dimension {dim}"
        )));
    }
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of 0..{}", dims.len())));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map: Vec<usize> = (0..dim)
        .map(|old| {
            let mut rest = old;
            let mut digits = vec![0; dims.len()];
            for t in (0..dims.len()).rev() {
                digits[t] = rest % dims[t];
                rest /= dims[t];
            }
            perm.iter()
                .zip(&new_dims)
                .fold(0, |acc, (&p, &d)| acc * d + digits[p])
        })
        .collect();
    let mut out = CMatrix::zeros(dim, dim);
    for (r, &nr) in map.iter().enumerate() {
        for (col, &nc) in map.iter().enumerate() {
            out[(nr, nc)] = a[(r, col)];
        }
    }
    Ok(out)
}

/// Swaps the outer and inner block levels of a matrix organized as
/// `outer x outer` blocks of `inner x inner` blocks of `block_dim x block_dim`
/// entries, i.e. `M_outer(M_inner(M_b)) -> M_inner(M_outer(M_b))`.
pub fn canonical_shuffle<T: Real>(
    a: &CMatrix<T>,
    outer_blocks: usize,
    inner_blocks: usize,
    block_dim: usize,
) -> Result<CMatrix<T>> {
    permute_subsystems(a, &[outer_blocks, inner_blocks, block_dim], &[1, 0, 2])
}
