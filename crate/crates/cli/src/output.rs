use koehler_core::report::CheckBlock;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: &'static str,
    pub analysis: &'static str,
    pub input_digest: String,
    pub result: serde_json::Value,
    pub blocks: Vec<CheckBlock>,
    pub wall_time_ms: u128,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}
