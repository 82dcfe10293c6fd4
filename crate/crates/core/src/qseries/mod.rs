//! Exact integer power-series arithmetic and Dedekind-eta-product
//! q-expansions: the brute-force oracle behind every coefficient family.

mod coeff;
mod eta;
mod series;

pub use coeff::ExactInt;
pub use eta::{
    eta_expand, eta_product_expand, forms, series_to_newform, EtaProductSpec, QseriesError,
};
pub use series::PowerSeries;
