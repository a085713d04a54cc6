pub mod cli;
pub mod consensus;
pub mod hlnc;
pub mod ltl;
pub mod network;
pub mod oracle;
pub mod planner;
pub mod ts;
