fn main() {
    println!("qsep");
}
