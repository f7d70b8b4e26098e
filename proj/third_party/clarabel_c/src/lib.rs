//! Minimal C ABI over the Clarabel interior-point solver.
//!
//! Solves   min ½xᵀPx + qᵀx   s.t.  Ax + s = b,  s ∈ K
//! with K = Zero(n_zero) × Nonneg(n_nonneg) × SOC(d_1) × ... × SOC(d_k),
//! cones ordered exactly as listed. P must be upper triangular CSC.

#![allow(non_snake_case)]

use clarabel::algebra::*;
use clarabel::solver::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

#[repr(C)]
pub struct ClarabelCSettings {
    pub max_iter: u32,
    pub time_limit: f64,
    pub tol_gap_abs: f64,
    pub tol_gap_rel: f64,
    pub tol_feas: f64,
    pub verbose: u8,
}

#[repr(C)]
pub struct ClarabelCResult {
    pub status: i32,
    pub iterations: u32,
    pub obj_val: f64,
    pub solve_time: f64,
    pub r_prim: f64,
    pub r_dual: f64,
}

/// Status codes (stable ABI):
///  0 unsolved, 1 solved, 2 primal infeasible, 3 dual infeasible,
///  4 almost solved, 5 almost primal infeasible, 6 almost dual infeasible,
///  7 max iterations, 8 max time, 9 numerical error, 10 insufficient progress,
///  11 callback terminated, -1 setup error, -2 panic.
fn status_code(s: SolverStatus) -> i32 {
    match s {
        SolverStatus::Unsolved => 0,
        SolverStatus::Solved => 1,
        SolverStatus::PrimalInfeasible => 2,
        SolverStatus::DualInfeasible => 3,
        SolverStatus::AlmostSolved => 4,
        SolverStatus::AlmostPrimalInfeasible => 5,
        SolverStatus::AlmostDualInfeasible => 6,
        SolverStatus::MaxIterations => 7,
        SolverStatus::MaxTime => 8,
        SolverStatus::NumericalError => 9,
        SolverStatus::InsufficientProgress => 10,
        SolverStatus::CallbackTerminated => 11,
    }
}

unsafe fn csc(
    m: usize,
    n: usize,
    colptr: *const usize,
    rowval: *const usize,
    nzval: *const f64,
) -> CscMatrix<f64> {
    let colptr = slice::from_raw_parts(colptr, n + 1).to_vec();
    let nnz = colptr[n];
    let (rowval, nzval) = if nnz == 0 {
        (Vec::new(), Vec::new())
    } else {
        (
            slice::from_raw_parts(rowval, nnz).to_vec(),
            slice::from_raw_parts(nzval, nnz).to_vec(),
        )
    };
    CscMatrix::new(m, n, colptr, rowval, nzval)
}

/// Returns 0 when the solver ran (see `result.status`), nonzero on setup failure.
#[no_mangle]
pub unsafe extern "C" fn clarabel_c_solve(
    n: usize,
    m: usize,
    p_colptr: *const usize,
    p_rowval: *const usize,
    p_nzval: *const f64,
    q: *const f64,
    a_colptr: *const usize,
    a_rowval: *const usize,
    a_nzval: *const f64,
    b: *const f64,
    n_zero: usize,
    n_nonneg: usize,
    n_soc: usize,
    soc_dims: *const usize,
    settings: *const ClarabelCSettings,
    x_out: *mut f64,
    z_out: *mut f64,
    s_out: *mut f64,
    result: *mut ClarabelCResult,
) -> i32 {
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let P = csc(n, n, p_colptr, p_rowval, p_nzval);
        let A = csc(m, n, a_colptr, a_rowval, a_nzval);
        let q = if n == 0 { Vec::new() } else { slice::from_raw_parts(q, n).to_vec() };
        let b = if m == 0 { Vec::new() } else { slice::from_raw_parts(b, m).to_vec() };

        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        if n_zero > 0 {
            cones.push(ZeroConeT(n_zero));
        }
        if n_nonneg > 0 {
            cones.push(NonnegativeConeT(n_nonneg));
        }
        if n_soc > 0 {
            for &d in slice::from_raw_parts(soc_dims, n_soc) {
                cones.push(SecondOrderConeT(d));
            }
        }

        let cs = &*settings;
        let built = DefaultSettingsBuilder::default()
            .max_iter(cs.max_iter)
            .time_limit(cs.time_limit)
            .tol_gap_abs(cs.tol_gap_abs)
            .tol_gap_rel(cs.tol_gap_rel)
            .tol_feas(cs.tol_feas)
            .verbose(cs.verbose != 0)
            .build();
        let settings = match built {
            Ok(s) => s,
            Err(_) => return -1,
        };

        let mut solver = match DefaultSolver::new(&P, &q, &A, &b, &cones, settings) {
            Ok(s) => s,
            Err(_) => return -1,
        };
        solver.solve();

        let sol = &solver.solution;
        if n > 0 {
            slice::from_raw_parts_mut(x_out, n).copy_from_slice(&sol.x);
        }
        if m > 0 {
            slice::from_raw_parts_mut(z_out, m).copy_from_slice(&sol.z);
            slice::from_raw_parts_mut(s_out, m).copy_from_slice(&sol.s);
        }
        let r = &mut *result;
        r.status = status_code(sol.status);
        r.iterations = sol.iterations;
        r.obj_val = sol.obj_val;
        r.solve_time = sol.solve_time;
        r.r_prim = sol.r_prim;
        r.r_dual = sol.r_dual;
        0
    }));
    match outcome {
        Ok(code) => code,
        Err(_) => {
            (*result).status = -2;
            -2
        }
    }
}
