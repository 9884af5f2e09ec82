pub mod evaluate;
pub mod forecast;
pub mod preprocess;
pub mod synth;
pub mod train;
