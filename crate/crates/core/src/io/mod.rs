//! Dataset files, report rendering and SVG figures.

pub mod charts;
pub mod dataset;
pub mod report;

pub use charts::emit_charts;
pub use dataset::{bundled_aducanumab, parse_dataset, render_dataset, DataFormat, Dataset};
pub use report::{
    default_groups, render_label, render_meta, render_report, render_study, run_meta,
    run_reanalysis, study_report, MetaGroup, MetaReport, Report, ReportFormat, StudyReport,
};
