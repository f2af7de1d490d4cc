//! Limited-trust Stackelberg games played over social networks.
//!
//! The crate is layered bottom-up: [`game`] solves single bimatrix games
//! under limited trust, [`learn`] infers neighbors' trust levels from
//! observed play, [`net`] runs rounds of games over a social network,
//! [`meta`] adapts trust levels between rounds, and [`rates`] measures how
//! fast the learning converges. [`config`] and [`experiment`] wire these
//! into reproducible experiment runs.
//!
//! Numeric code is generic over the scalar type via [`game::Scalar`]
//! (any `num_traits::Float`); the aliases below fix `f64` for everyday use.

pub mod config;
pub mod error;
pub mod experiment;
pub mod game;
pub mod learn;
pub mod meta;
pub mod net;
pub mod rates;

pub use error::{Error, Result};

/// A bimatrix game with `f64` payoffs.
pub type Game = game::BimatrixGame<f64>;
/// A trust level with `f64` precision.
pub type Trust = game::TrustLevel<f64>;
/// A solved-game outcome with `f64` payoffs.
pub type Outcome = game::LtseOutcome<f64>;
/// A trust-level bound interval with `f64` endpoints.
pub type Interval = learn::BoundInterval<f64>;
