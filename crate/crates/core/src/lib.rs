//! Musical chairs on a circle: the seating process behind linear-probing
//! hash tables, exact rejection counts, and a constructive bijection
//! between rejections and sample/pattern matches, checked exhaustively.

pub mod bijection;
pub mod enumeration;
pub mod error;
pub mod formula;
pub mod model;
pub mod seating;

pub use error::{Error, Result};
pub use model::{ChairId, CircularInterval, MatchRecord, Pattern, PlayerId, Rejection, Sample};
