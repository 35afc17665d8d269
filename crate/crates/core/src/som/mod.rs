//! Batch self-organizing map and the form-map built on top of it.

mod formmap;
mod io;
mod model;
mod train;

pub use formmap::{build_form_map, FormMapCell, FormMapGrid};
pub use io::{read_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use model::{som_quality, SomModel, SomQuality, TrainingMeta};
pub use train::{train_som, SomConfig};
