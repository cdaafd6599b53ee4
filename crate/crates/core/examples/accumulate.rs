//! `+=` and `-=` accumulate straight into the destination: no initial copy.

use kernelplan::{exec_plan, lower, parse_statement, render_plan, Workspace};

fn main() {
    let mut ws = Workspace::new();
    ws.bind_vector("X", vec![10.0, 20.0, 30.0]).unwrap();
    ws.bind_vector("A", vec![1.0, 2.0, 3.0]).unwrap();
    ws.bind_vector("B", vec![0.5, 0.5, 0.5]).unwrap();
    ws.bind_scalar("c", 4.0).unwrap();

    for text in ["X += A - B", "X -= c*A + B", "X = X + c*B"] {
        let stmt = parse_statement(text, &ws).unwrap();
        let plan = lower(&stmt, &ws).unwrap();
        print!("{text}\n{}", render_plan(&plan));
        exec_plan(&plan, &mut ws).unwrap();
        println!("  X = {:?}\n", ws.vector("X").unwrap());
    }
}
