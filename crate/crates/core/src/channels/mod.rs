//! Channels (Kraus form), superoperators (transfer matrices), Choi matrices,
//! named families and Haar-random sampling.

mod channel;
mod choi;
mod named;
mod random;
mod spec;
mod superop;

pub use channel::{compose_theta, id_minus, Channel, CptpReport, TP_TOL};
pub use choi::{superop_choi, ChoiMatrix};
pub use named::{named_channel, phase_unitary, ChannelFamily};
pub use random::{default_env, random_channel, seeded_rng};
pub use spec::ChannelSpec;
pub use superop::{matrix_unit, GroupedIndex, SuperOperator};

/// `Φ ↦ transfer`, the free-function form of [`Channel::to_superop`].
pub fn channel_to_superop(t: &Channel) -> SuperOperator {
    t.to_superop()
}
