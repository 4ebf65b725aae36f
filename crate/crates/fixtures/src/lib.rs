//! Test fixtures for the privacy audit workspace: independent encoders for
//! compiled XML, resource tables, DEX files and APK archives, plus scenario
//! apps, declarations and a hand-labeled field corpus.

pub mod apk;
pub mod arsc;
pub mod dex;
pub mod mutate;
pub mod scenarios;
pub mod strategies;
pub mod xml;
