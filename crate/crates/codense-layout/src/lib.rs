//! Repetition coding over a schedule of geometrically separated intervals.
//!
//! A schedule assigns each row `i` a payload width `2^{n_i}` and an error
//! budget `2^{-b_i}`. Row magnitudes follow the recurrences
//! `r_i = 2 b_i + n_i + l_{i-1}`, `l% = 2^{r_i - b_i}`,
//! `l_i = l% + 2^{n_i + r_i}` (writing `l%` for the lower interval end), so
//! the coding interval `L_i = [l%, l_i)` dwarfs everything before it and the
//! fallow gap `L% = [l_{i-1}, l%)` separates consecutive rows. Payload bits
//! are repeated `2^{r_i}` times across `L_i` and recovered by strict majority.
//!
//! Magnitudes grow as an exponential tower, so row values carry an explicit
//! scale marker and operations that would need an unrepresentable value
//! report that instead of approximating.

pub mod error;
pub mod repcode;
pub mod rows;
pub mod schedule;
pub mod setview;

pub use error::LayoutError;
pub use repcode::{mod_rep, mod_rep_inv};
pub use rows::{layout_row_local, layout_rows, LayoutRow, Scale};
pub use schedule::{LayoutSchedule, RowSpec};
pub use setview::{window_density_row_local, SymbolicSet};
