// widget helpers for panel 2
var counter2 = 0;
function updateCounter2(delta2) {
  counter2 = counter2 + delta2;
  return counter2;
}
var message2 = "counter2 ignored";
panel2.label = message2;
