pub mod fit;
pub mod gap;
pub mod predict_max;
pub mod report;
pub mod simulate;
