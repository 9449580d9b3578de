//! Parses programs, prints them back and reports diagnostics.

use xc::lang::{parse_str, print, SourceProgram};

fn main() {
    let good = "def twice(x) { x + x }\nval g = gradient(sense(\"source\"));\nif (g < 10) { twice(g) } else { inf }";
    let e = parse_str(good).expect("parses");
    println!("printed:\n{}\n", print(&e));

    for text in [good, "val x = 1;\nx + y", "pair(1,"] {
        let src = SourceProgram::with_globals(text, &xc::stdlib::names());
        if src.diagnostics.is_empty() {
            println!("ok");
        }
        for d in &src.diagnostics {
            println!("{}", d.render("input.xc"));
        }
    }
}
