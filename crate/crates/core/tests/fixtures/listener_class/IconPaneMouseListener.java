import java.awt.event.MouseEvent;
import java.awt.event.MouseListener;

class IconPaneMouseListener implements MouseListener {
  private boolean isDrag;
  private boolean isMouseExited;

  @Override
  public void mouseClicked(MouseEvent e) {
    if (!isDrag) {
      //...
    }
  }

  @Override
  public void mouseReleased(MouseEvent e) {
    isDrag = false;
  }

  @Override
  public void mouseEntered(MouseEvent e) {
    isMouseExited = false;
    // ...
  }

  @Override public void mousePressed(MouseEvent e) { }
  @Override public void mouseExited(MouseEvent e) { }
}
