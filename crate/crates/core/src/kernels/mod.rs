//! Exact transition kernels and the identities relating them.

pub mod checks;
pub mod elementary;
pub mod nstep;
pub mod pair;
pub mod pd;
pub mod pieri;
pub mod rows;
pub mod tails;

pub use checks::{check_desintegration, check_intertwining, DesintegrationReport, IntertwiningReport, Violation};
pub use elementary::{blocked_left_pmf, blocked_right_pmf, free_shift_pmf, geometric_pmf, r_pmf, reflected_right_pmf};
pub use nstep::{n_step_law, n_step_pair_law};
pub use pair::{l_k_pmf, q_k_pmf, s_k_pmf, TripleState, WPlusPair};
pub use pd::{p_d_closed, p_d_series, p_d_tail_bound, r_k_pmf};
pub use pieri::{gamma, mu_pmf, nu_pmf, pieri_decompose};
pub use rows::{l_k_row, p_d_row, q_k_row, r_k_row, s_k_row, weights_in_box};
pub use tails::{negbin_tail_bound, nu_tail_bound, r_k_row_tail_bound};
