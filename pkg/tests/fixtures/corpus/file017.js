// widget helpers for panel 17
var counter17 = 0;
function updateCounter17(delta17) {
  counter17 = counter17 + delta17;
  return counter17;
}
var message17 = "counter17 ignored";
panel17.label = message17;
