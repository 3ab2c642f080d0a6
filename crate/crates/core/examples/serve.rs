//! Run the HTTP API used by the editor front end.
//!
//! cargo run --example serve [port]
//!
//! curl -s localhost:8080/api/health
//! curl -s localhost:8080/api/visualize -d '{"sql": "select r.a from r"}'

use qviz::render::StyleConfig;

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let port: u16 = std::env::args()
        .nth(1)
        .and_then(|p| p.parse().ok())
        .unwrap_or(8080);
    let listener = std::net::TcpListener::bind(("127.0.0.1", port))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let style = StyleConfig::from_env().map_err(std::io::Error::other)?;
    qviz::serve::serve_std(listener, style).await
}
