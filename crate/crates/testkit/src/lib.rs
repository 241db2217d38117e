//! Test support: seeded generators of small databases and queries, a
//! nested-loop reference evaluator written without reference to the
//! production one, and query mutators for matching tests.

pub mod agree;
pub mod gen;
pub mod oracle;

pub use agree::{compare_with_oracle, Agreement};
pub use gen::{mutate, random_instance, respell, Instance, InstanceConfig, Mutation};
pub use oracle::{like_oracle, oracle_evaluate, sorted_rows};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
