pub mod config;
pub mod error;
pub mod format;
pub mod predicate;
pub mod protocol;
pub mod semantics;
pub mod table;

pub use config::{Configuration, StateId};
pub use error::ModelError;
pub use format::{LoadedProtocol, ProtocolDoc, EXPORT_STATE_LIMIT};
pub use predicate::{Predicate, PredicateSpec};
pub use protocol::{moves, successors, Opinion, Output, OutputKind, Protocol, Transition};
pub use semantics::{
    apply_move, apply_snipe, check_states, config_from_strings, config_to_strings, enabled_transitions, format_config,
    is_terminal, move_successors, output_of, output_of_support,
};
pub use table::{find_isomorphism, materialize, TableProtocol};
