//! Static privacy-label extraction for Android apps and comparison against
//! declared data-safety sections.

pub mod apianalysis;
pub mod axml;
pub mod container;
pub mod datasets;
pub mod dexscan;
pub mod manifestanalysis;
pub mod pipeline;
pub mod safetycompare;
pub mod taxonomy;
pub mod uianalysis;
