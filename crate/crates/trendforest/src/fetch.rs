//! Downloading a price file over HTTP(S).

use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("request failed: {0}")]
    Network(String),
    #[error("server answered with status {0}")]
    NonSuccessStatus(u16),
}

/// GETs `url` and returns the body unparsed. `symbol` is only used in
/// error messages; the URL is sent verbatim.
pub fn fetch_remote(url: &str, symbol: &str) -> Result<String, FetchError> {
    let agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(60)))
        .build()
        .new_agent();
    let mut response = agent.get(url).call().map_err(|e| match e {
        ureq::Error::StatusCode(code) => FetchError::NonSuccessStatus(code),
        other => FetchError::Network(format!("{symbol}: {other}")),
    })?;
    let status = response.status().as_u16();
    if !(200..300).contains(&status) {
        return Err(FetchError::NonSuccessStatus(status));
    }
    response
        .body_mut()
        .read_to_string()
        .map_err(|e| FetchError::Network(format!("{symbol}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::thread;

    /// Serves one canned response and returns the URL to hit.
    fn stub(status: &str, body: &'static str) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let head = format!(
            "HTTP/1.1 {status}\r\nContent-Type: text/csv\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
            body.len()
        );
        thread::spawn(move || {
            let (mut sock, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            let mut seen = Vec::new();
            while !seen.windows(4).any(|w| w == b"\r\n\r\n") {
                let n = sock.read(&mut buf).unwrap();
                if n == 0 {
                    break;
                }
                seen.extend_from_slice(&buf[..n]);
            }
            sock.write_all(head.as_bytes()).unwrap();
            sock.write_all(body.as_bytes()).unwrap();
        });
        format!("http://{addr}/AAPL.csv")
    }

    const CSV: &str = "Date,Open,High,Low,Close,Volume\n2020-01-02,10,11,9,10.5,1000\n";

    #[test]
    fn passes_body_through() {
        let url = stub("200 OK", CSV);
        assert_eq!(fetch_remote(&url, "AAPL").unwrap(), CSV);
    }

    #[test]
    fn not_found() {
        let url = stub("404 Not Found", "nope");
        assert!(matches!(
            fetch_remote(&url, "AAPL"),
            Err(FetchError::NonSuccessStatus(404))
        ));
    }

    #[test]
    fn unreachable() {
        // Bind then drop to get a port nothing listens on.
        let port = TcpListener::bind("127.0.0.1:0")
            .unwrap()
            .local_addr()
            .unwrap()
            .port();
        let url = format!("http://127.0.0.1:{port}/x.csv");
        assert!(matches!(
            fetch_remote(&url, "AAPL"),
            Err(FetchError::Network(_))
        ));
    }
}
