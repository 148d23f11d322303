//! Client for classifiers served over newline-delimited JSON.
//!
//! The server speaks first with `{"type":"hello","num_classes":k,"feature_dim":d}`.
//! Each request is `{"type":"classify","id":i,"graph":{…}}` and is answered by
//! `{"type":"probs","id":i,"probs":[…]}` or `{"type":"error","id":i,"message":…}`.
//! Responses are matched by id, so the server may answer out of order.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{ClassDistribution, Classifier};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::graph_to_json;
use crate::rng::StreamRng;

/// Requests kept in flight by [`Classifier::classify_batch`].
pub const PIPELINE_WINDOW: usize = 64;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Frame {
    Hello { num_classes: usize, feature_dim: usize },
    Probs { id: u64, probs: Vec<f64> },
    Error { id: Option<u64>, message: String },
}

#[derive(Serialize)]
struct Request<'a> {
    #[serde(rename = "type")]
    kind: &'a str,
    id: u64,
    graph: serde_json::Value,
}

struct Connection {
    reader: Box<dyn BufRead + Send>,
    writer: Box<dyn Write + Send>,
    next_id: u64,
}

impl Connection {
    fn read_frame(&mut self) -> Result<Frame> {
        let mut line = String::new();
        loop {
            line.clear();
            let n = self.reader.read_line(&mut line).map_err(|e| Error::Bridge(format!("read failed: {e}")))?;
            if n == 0 {
                return Err(Error::Bridge("server closed the connection".into()));
            }
            if !line.trim().is_empty() {
                break;
            }
        }
        serde_json::from_str(line.trim()).map_err(|e| Error::Bridge(format!("bad frame {:?}: {e}", line.trim())))
    }

    fn send(&mut self, g: &Graph) -> Result<u64> {
        let id = self.next_id;
        self.next_id += 1;
        let req = Request { kind: "classify", id, graph: graph_to_json(g) };
        let mut buf = serde_json::to_vec(&req)?;
        buf.push(b'\n');
        self.writer.write_all(&buf).map_err(|e| Error::Bridge(format!("write failed: {e}")))?;
        Ok(id)
    }

    fn flush(&mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::Bridge(format!("write failed: {e}")))
    }
}

/// A classifier living in another process or on another host.
pub struct BridgeClassifier {
    conn: Mutex<Connection>,
    child: Mutex<Option<Child>>,
    num_classes: usize,
    feature_dim: usize,
}

impl std::fmt::Debug for BridgeClassifier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BridgeClassifier")
            .field("num_classes", &self.num_classes)
            .field("feature_dim", &self.feature_dim)
            .finish_non_exhaustive()
    }
}

impl BridgeClassifier {
    /// Runs `cmd` through `sh -c` and talks to it over stdin/stdout.
    pub fn spawn(cmd: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(cmd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Bridge(format!("cannot start `{cmd}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        match Self::handshake(BufReader::new(stdout), stdin) {
            Ok(mut b) => {
                b.child = Mutex::new(Some(child));
                Ok(b)
            }
            Err(e) => {
                let _ = child.kill();
                let _ = child.wait();
                Err(e)
            }
        }
    }

    pub fn connect(addr: &str) -> Result<Self> {
        let stream = TcpStream::connect(addr).map_err(|e| Error::Bridge(format!("cannot connect to {addr}: {e}")))?;
        let _ = stream.set_nodelay(true);
        let reader = stream.try_clone().map_err(|e| Error::Bridge(e.to_string()))?;
        Self::handshake(BufReader::new(reader), stream)
    }

    /// Performs the handshake over arbitrary streams.
    pub fn from_streams<R, W>(reader: R, writer: W) -> Result<Self>
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        Self::handshake(BufReader::new(reader), writer)
    }

    fn handshake<R, W>(reader: BufReader<R>, writer: W) -> Result<Self>
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        let mut conn = Connection { reader: Box::new(reader), writer: Box::new(writer), next_id: 0 };
        match conn.read_frame()? {
            Frame::Hello { num_classes, feature_dim } if num_classes >= 1 => Ok(BridgeClassifier {
                conn: Mutex::new(conn),
                child: Mutex::new(None),
                num_classes,
                feature_dim,
            }),
            other => Err(Error::Bridge(format!("expected a hello frame, got {other:?}"))),
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    fn check_input(&self, g: &Graph) -> Result<()> {
        if g.features().dim() != self.feature_dim {
            return Err(Error::InvalidArgument(format!(
                "graph has feature width {}, server expects {}",
                g.features().dim(),
                self.feature_dim
            )));
        }
        Ok(())
    }

    fn to_distribution(&self, id: u64, probs: Vec<f64>) -> Result<ClassDistribution> {
        if probs.len() != self.num_classes {
            return Err(Error::Bridge(format!(
                "response {id} has {} probabilities, expected {}",
                probs.len(),
                self.num_classes
            )));
        }
        ClassDistribution::new(probs).map_err(|e| Error::Bridge(format!("response {id}: {e}")))
    }

    fn lock(&self) -> Result<std::sync::MutexGuard<'_, Connection>> {
        self.conn.lock().map_err(|_| Error::Bridge("connection poisoned by an earlier failure".into()))
    }
}

impl Classifier for BridgeClassifier {
    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn classify(&self, g: &Graph, rng: &mut StreamRng) -> Result<ClassDistribution> {
        Ok(self.classify_batch(std::slice::from_ref(g), std::slice::from_mut(rng))?.remove(0))
    }

    fn classify_batch(&self, graphs: &[Graph], _: &mut [StreamRng]) -> Result<Vec<ClassDistribution>> {
        for g in graphs {
            self.check_input(g)?;
        }
        let mut conn = self.lock()?;
        let mut out: Vec<Option<ClassDistribution>> = vec![None; graphs.len()];
        let mut pending: HashMap<u64, usize> = HashMap::new();
        let mut sent = 0;
        let mut done = 0;
        while done < graphs.len() {
            while sent < graphs.len() && pending.len() < PIPELINE_WINDOW {
                let id = conn.send(&graphs[sent])?;
                pending.insert(id, sent);
                sent += 1;
            }
            conn.flush()?;
            match conn.read_frame()? {
                Frame::Probs { id, probs } => {
                    let slot = pending
                        .remove(&id)
                        .ok_or_else(|| Error::Bridge(format!("response for unknown id {id}")))?;
                    out[slot] = Some(self.to_distribution(id, probs)?);
                    done += 1;
                }
                Frame::Error { id, message } => {
                    return Err(Error::Bridge(match id {
                        Some(id) => format!("server rejected request {id}: {message}"),
                        None => format!("server error: {message}"),
                    }));
                }
                Frame::Hello { .. } => return Err(Error::Bridge("unexpected second hello frame".into())),
            }
        }
        Ok(out.into_iter().map(|d| d.expect("every slot answered")).collect())
    }
}

impl Drop for BridgeClassifier {
    fn drop(&mut self) {
        // Closing stdin asks a stdio server to exit.
        if let Ok(conn) = self.conn.get_mut() {
            conn.writer = Box::new(std::io::sink());
        }
        if let Ok(Some(mut child)) = self.child.get_mut().map(Option::take) {
            let deadline = Instant::now() + Duration::from_secs(2);
            while Instant::now() < deadline {
                if let Ok(Some(_)) = child.try_wait() {
                    return;
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}
