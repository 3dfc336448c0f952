use std::ffi::OsStr;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{RunFailure, RunSample, ShimStatus};

pub const STATUS_PREFIX: &str = "PELLI-SHIM:";
const STDERR_TAIL_BYTES: usize = 2000;

/// What the OS reported about one finished child.
#[derive(Debug, Clone)]
pub struct RawRun {
    pub wall: Duration,
    pub cpu: Duration,
    pub peak_rss_bytes: u64,
    pub exit_code: Option<i32>,
    pub signal: Option<i32>,
    pub timed_out: bool,
    pub stdout: String,
    pub stderr: String,
}

fn timeval(tv: libc::timeval) -> Duration {
    Duration::from_secs(tv.tv_sec as u64) + Duration::from_micros(tv.tv_usec as u64)
}

/// `VmHWM` from `/proc/<pid>/status`, in bytes.
fn sampled_peak(pid: i32) -> Option<u64> {
    let status = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn drain(mut r: impl Read + Send + 'static) -> thread::JoinHandle<Vec<u8>> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        buf
    })
}

pub(super) fn run_child(
    program: &Path,
    args: &[&OsStr],
    timeout: Duration,
    interval: Duration,
) -> std::io::Result<RawRun> {
    let start = Instant::now();
    let mut child =
        Command::new(program).args(args).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn()?;
    let pid = child.id() as libc::pid_t;
    let out = drain(child.stdout.take().expect("piped stdout"));
    let err = drain(child.stderr.take().expect("piped stderr"));

    let mut status: libc::c_int = 0;
    // SAFETY: rusage is plain old data; zeroed is a valid value.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let mut peak = 0u64;
    let mut timed_out = false;
    loop {
        // SAFETY: pid is our own unreaped child; the out-pointers are valid.
        let r = unsafe { libc::wait4(pid, &mut status, libc::WNOHANG, &mut usage) };
        if r == pid {
            break;
        }
        if r < 0 {
            let e = std::io::Error::last_os_error();
            if e.kind() == std::io::ErrorKind::Interrupted {
                continue;
            }
            return Err(e);
        }
        if let Some(p) = sampled_peak(pid) {
            peak = peak.max(p);
        }
        let elapsed = start.elapsed();
        if elapsed >= timeout {
            timed_out = true;
            // SAFETY: signalling and reaping our own child.
            unsafe {
                libc::kill(pid, libc::SIGKILL);
                while libc::wait4(pid, &mut status, 0, &mut usage) < 0
                    && std::io::Error::last_os_error().kind() == std::io::ErrorKind::Interrupted
                {}
            }
            break;
        }
        thread::sleep(interval.min(timeout - elapsed));
    }
    let wall = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err.join().unwrap_or_default()).into_owned();

    let (exit_code, signal) = if libc::WIFEXITED(status) {
        (Some(libc::WEXITSTATUS(status)), None)
    } else if libc::WIFSIGNALED(status) {
        (None, Some(libc::WTERMSIG(status)))
    } else {
        (None, None)
    };
    // ru_maxrss is in kilobytes on Linux.
    let maxrss = (usage.ru_maxrss.max(0) as u64) * 1024;
    Ok(RawRun {
        wall,
        cpu: timeval(usage.ru_utime) + timeval(usage.ru_stime),
        peak_rss_bytes: peak.max(maxrss),
        exit_code,
        signal,
        timed_out,
        stdout,
        stderr,
    })
}

/// Parses the final non-empty stdout line as a status record.
pub fn parse_status_line(stdout: &str) -> Result<ShimStatus, String> {
    let last = stdout.lines().rev().find(|l| !l.trim().is_empty()).ok_or("no output")?;
    let json = last.trim_end().strip_prefix(STATUS_PREFIX).ok_or("final stdout line is not a status line")?;
    serde_json::from_str(json).map_err(|e| format!("status line is not valid JSON: {e}"))
}

fn tail(text: &str) -> String {
    if text.len() <= STDERR_TAIL_BYTES {
        return text.to_string();
    }
    let mut cut = text.len() - STDERR_TAIL_BYTES;
    while !text.is_char_boundary(cut) {
        cut += 1;
    }
    text[cut..].to_string()
}

impl RawRun {
    pub fn into_sample(self) -> RunSample {
        let wall = self.wall.as_secs_f64();
        let cpu_percent = if wall > 0.0 { (self.cpu.as_secs_f64() / wall * 100.0).clamp(0.0, 100.0) } else { 0.0 };
        let status = parse_status_line(&self.stdout);
        let shim = status.as_ref().ok().cloned();
        let failure = classify(&self, status);
        RunSample {
            cpu_percent,
            peak_rss_bytes: self.peak_rss_bytes,
            wall_time: wall,
            exit_status: self.exit_code,
            stderr_tail: tail(&self.stderr),
            shim,
            failure,
        }
    }
}

fn classify(run: &RawRun, status: Result<ShimStatus, String>) -> Option<RunFailure> {
    if run.timed_out {
        return Some(RunFailure::Timeout);
    }
    if let Some(signal) = run.signal {
        return Some(RunFailure::KilledBySignal { signal });
    }
    let code = run.exit_code.unwrap_or(-1);
    let status = match status {
        Ok(s) => s,
        Err(message) if code == 0 => return Some(RunFailure::ShimProtocol { message }),
        Err(_) => return Some(RunFailure::NonZeroExit { code }),
    };
    match code {
        0 if status.ok && status.entry_point_found && status.exception.is_none() => None,
        0 => Some(RunFailure::ShimProtocol { message: "exit 0 with a non-ok status".into() }),
        3 if !status.entry_point_found => Some(RunFailure::EntryPointMissing),
        4 => {
            let (type_name, message) =
                status.exception.map(|e| (e.type_name, e.message)).unwrap_or_else(|| ("unknown".into(), String::new()));
            Some(RunFailure::SolutionException { type_name, message })
        }
        5 => Some(RunFailure::BadInput),
        3 => Some(RunFailure::ShimProtocol { message: "exit 3 while reporting the entry point as found".into() }),
        code => Some(RunFailure::NonZeroExit { code }),
    }
}
