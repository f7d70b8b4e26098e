#pragma once

#include <cstddef>
#include <cstdint>

extern "C" {

struct ClarabelCSettings {
  std::uint32_t max_iter;
  double time_limit;
  double tol_gap_abs;
  double tol_gap_rel;
  double tol_feas;
  std::uint8_t verbose;
};

struct ClarabelCResult {
  std::int32_t status;
  std::uint32_t iterations;
  double obj_val;
  double solve_time;
  double r_prim;
  double r_dual;
};

int clarabel_c_solve(std::size_t n, std::size_t m, const std::size_t* p_colptr,
                     const std::size_t* p_rowval, const double* p_nzval, const double* q,
                     const std::size_t* a_colptr, const std::size_t* a_rowval,
                     const double* a_nzval, const double* b, std::size_t n_zero,
                     std::size_t n_nonneg, std::size_t n_soc, const std::size_t* soc_dims,
                     const ClarabelCSettings* settings, double* x_out, double* z_out,
                     double* s_out, ClarabelCResult* result);
}
