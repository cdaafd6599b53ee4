//! Sign propagation through nested additions and subtractions.
//!
//! `cargo run --example sign_rule`

use kernelplan::{combine_signs, lower, parse_statement, render_plan, Sign, Workspace};

fn main() {
    println!("outer inner -> effective");
    for a in Sign::ALL {
        for b in Sign::ALL {
            println!("  {a}     {b}   ->  {}", combine_signs(a, b));
        }
    }

    let mut ws = Workspace::new();
    for name in ["X", "A", "B", "C", "D"] {
        ws.bind_vector(name, vec![0.0; 4]).unwrap();
    }
    for text in ["X = A - (B - C)", "X = A - (B - (C + D))", "X -= A - B"] {
        let stmt = parse_statement(text, &ws).unwrap();
        println!("\n{text}");
        print!("{}", render_plan(&lower(&stmt, &ws).unwrap()));
    }
}
