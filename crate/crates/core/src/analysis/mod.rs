//! Representations of a sample (PDF, CCDF, rank curve), power-law fits,
//! concentration metrics and lower-tail classification.

pub mod ccdf;
pub mod classify;
pub mod concentration;
pub mod exponents;
pub mod fit;
pub mod gini;
pub mod histogram;
pub mod rank;
pub mod summary;

pub use ccdf::{ccdf, Ccdf};
pub use classify::{classify, classify_histogram, Classification, ClassifyConfig, Evidence, Verdict};
pub use concentration::{concentration_profile, ConcentrationProfile};
pub use exponents::{convert_exponents, Representation};
pub use fit::{fit_loglog, TailFit};
pub use gini::{gini, top_share};
pub use histogram::{log_binned_pdf, pdf_histogram, Histogram};
pub use rank::{rank_curve, RankCurve};
pub use summary::{summarize, DistributionSummary, Exponents, Fits, SummaryOptions};
