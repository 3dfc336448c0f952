//! Static analysis of Python source code.

pub mod analyze;
pub mod ast;
pub mod complexity;
pub mod error;
pub mod halstead;
pub mod lexer;
pub mod lint;
pub mod maintainability;
pub mod parser;
pub mod stats;

pub use analyze::{analyze, analyze_with, Analysis, MetricVector};
pub use error::{AnalyzerError, SyntaxError};
pub use parser::{parse, SyntaxTree};
