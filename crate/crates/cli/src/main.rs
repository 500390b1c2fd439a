fn main() {
    println!("shrinkerlab");
}
