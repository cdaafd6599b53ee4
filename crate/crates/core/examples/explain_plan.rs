//! Parse a statement, lower it, and print the plan as text and JSON.
//!
//! `cargo run --example explain_plan -- "y = y + c1*u1 - cos(c2*u2 + u3)"`

use kernelplan::lower::plan_to_json;
use kernelplan::{lower, parse_statement, specialize, Workspace};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "y = y + c1*u1 - cos(c2*u2 + u3)".to_string());

    let mut ws = Workspace::new();
    for v in ["y", "u1", "u2", "u3", "X", "A", "B"] {
        ws.bind_vector(v, vec![0.0; 8]).unwrap();
    }
    ws.bind_scalar("c1", 2.0).unwrap();
    ws.bind_scalar("c2", 0.5).unwrap();

    let stmt = match parse_statement(&text, &ws) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{text}\n{e}");
            std::process::exit(2);
        }
    };
    let plan = lower(&stmt, &ws).expect("shapes agree");
    println!("{stmt}\n\n{plan}");
    let spec = specialize(&plan);
    if spec != plan {
        println!("specialized:\n{spec}");
    }
    println!("{}", plan_to_json(&plan));
}
