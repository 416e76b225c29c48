#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use reqwest::blocking::Client;
use serde_json::Value;

pub fn demo_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus/demo")
        .canonicalize()
        .unwrap()
}

/// Writes a config next to `dir` pointing at the demo corpus.
pub fn write_config(dir: &Path, reprompt_limit: u32) -> PathBuf {
    let path = dir.join("dialogue.toml");
    let text = format!(
        "reprompt_limit = {reprompt_limit}\nrng_seed = 7\ncorpus_dir = {:?}\nstorage_path = \"data\"\n",
        demo_corpus().display().to_string()
    );
    std::fs::write(&path, text).unwrap();
    path
}

/// A `dialogue-server` child process on an ephemeral port.
pub struct TestServer {
    child: Child,
    pub base: String,
    client: Client,
}

impl TestServer {
    pub fn start(config: &Path, data_dir: &Path) -> TestServer {
        let mut child = Command::new(env!("CARGO_BIN_EXE_dialogue-server"))
            .arg("--config")
            .arg(config)
            .arg("--data-dir")
            .arg(data_dir)
            .args(["--port", "0"])
            .env("RUST_LOG", "warn")
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("spawn dialogue-server");
        let stdout = child.stdout.take().unwrap();
        let mut line = String::new();
        BufReader::new(stdout).read_line(&mut line).unwrap();
        let addr = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        TestServer {
            child,
            base: format!("http://{addr}"),
            client: Client::builder().timeout(Duration::from_secs(30)).build().unwrap(),
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        let resp = self.client.get(self.url(path)).send().unwrap();
        (resp.status().as_u16(), resp.json().unwrap_or(Value::Null))
    }

    pub fn post(&self, path: &str, body: Value) -> (u16, Value) {
        let resp = self.client.post(self.url(path)).json(&body).send().unwrap();
        (resp.status().as_u16(), resp.json().unwrap_or(Value::Null))
    }

    pub fn post_raw(&self, path: &str, body: &'static str) -> (u16, Value) {
        let resp = self
            .client
            .post(self.url(path))
            .header("content-type", "application/json")
            .body(body)
            .send()
            .unwrap();
        (resp.status().as_u16(), resp.json().unwrap_or(Value::Null))
    }

    pub fn stop(mut self) {
        self.kill();
    }

    fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.kill();
    }
}
