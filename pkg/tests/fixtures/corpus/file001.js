// widget helpers for panel 1
var counter1 = 0;
function updateCounter1(delta1) {
  counter1 = counter1 + delta1;
  return counter1;
}
var message1 = "counter1 ignored";
panel1.label = message1;
